#include "doctest.h"

#include <cmath>

#include "fixtures.hpp"
#include "iro/dominance_chain.hpp"
#include "iro/harness.hpp"

using namespace iro;

TEST_SUITE("dominance_chain") {

TEST_CASE("single chain steps") {
    const DominanceParams params{0.8, 3, 2};
    CHECK(y_step(params, 2, 0.5) == 2);   // at the floor, down move stays
    CHECK(y_step(params, 5, 0.5) == 4);   // above the floor, down move
    CHECK(y_step(params, 5, 0.95) == 8);  // up jump adds w
    CHECK_THROWS_AS(y_step(params, 1, 0.5), std::invalid_argument);

    // p = 1 descends monotonically to the floor
    DominanceParams sure{1.0, 3, 2};
    int y = 9;
    for (int k = 0; k < 7; ++k) y = y_step(sure, y, 0.3);
    CHECK(y == 2);

    CHECK(p_step(0.8, 2, 0, 0.5) == 0);
    CHECK(p_step(0.8, 2, 5, 0.9) == 7);
    CHECK(q_step(0.8, 2, 3, 0.9) == 6);  // rounds to the next multiple of w
    CHECK(q_step(0.8, 2, 0, 0.9) == 2);
    CHECK(q_step(0.8, 2, 4, 0.5) == 3);

    // an up jump from a state that is not a multiple of w lands strictly higher
    CHECK(q_step(0.8, 2, 3, 0.95) > p_step(0.8, 2, 3, 0.95));
}

TEST_CASE("closed-form stationary distribution of the rounded chain") {
    // p = 1: all mass at 0
    const ChainDistribution sure = stationary_q_closed_form(1.0, 3);
    CHECK(sure.mass[0] == 1.0);
    CHECK(sure.truncation_tail <= 1e-12);

    const ChainDistribution dist = stationary_q_closed_form(0.9, 2);
    CHECK(dist.mass_at(0) == doctest::Approx(62.0 / 81.0).epsilon(1e-12));
    CHECK(dist.mass_at(1) == doctest::Approx(62.0 / 729.0).epsilon(1e-12));
    // balance at state 1: pi(1) = p * pi(2)
    CHECK(dist.mass_at(2) == doctest::Approx(dist.mass_at(1) / 0.9).epsilon(1e-12));
    // balance at state 2: inflow from 3 (down) and 0 (up)
    CHECK(dist.mass_at(2) ==
          doctest::Approx(0.9 * dist.mass_at(3) + 0.1 * dist.mass_at(0)).epsilon(1e-12));

    CHECK(stationary_q_closed_form(0.95, 3).mass_at(0) == doctest::Approx(0.833649).epsilon(1e-6));

    CHECK_THROWS_AS(stationary_q_closed_form(0.7, 2), std::invalid_argument);
}

TEST_CASE("closed-form mass accounts for the truncated tail") {
    for (double p : {0.85, 0.9, 0.95, 0.99})
        for (int w : {1, 2, 3, 5}) {
            if (!(p > q_chain_threshold(w))) continue;
            const ChainDistribution dist = stationary_q_closed_form(p, w, 1e-13);
            CHECK(std::abs(dist.total_mass() - (1.0 - dist.truncation_tail)) <= 1e-14);
            const double pw = std::pow(p, w);
            CHECK(dist.mass_at(0) == doctest::Approx((2.0 * pw - 1.0) / pw).epsilon(1e-13));
        }
}

TEST_CASE("numeric stationary distribution matches the closed form") {
    const ChainDistribution closed = stationary_q_closed_form(0.9, 2, 1e-13);
    const ChainDistribution numeric = stationary_numeric(
        ChainKind::Q, DominanceParams{0.9, 2, 0}, suggested_truncation(0.9, 2, 1e-13));
    for (int i = 0; i < static_cast<int>(numeric.mass.size()); ++i)
        CHECK(std::abs(numeric.mass_at(i) - closed.mass_at(i)) <= 1e-8);

    // p = 1 gives a unit mass at the floor for every kind
    for (ChainKind kind : {ChainKind::P, ChainKind::Q, ChainKind::Y}) {
        const ChainDistribution sure = stationary_numeric(kind, DominanceParams{1.0, 2, 4}, 32);
        const int floor_state = kind == ChainKind::Y ? 4 : 0;
        CHECK(sure.mass_at(floor_state) == doctest::Approx(1.0).epsilon(1e-12));
    }

    CHECK_THROWS_AS(stationary_numeric(ChainKind::Q, DominanceParams{0.7, 2, 0}, 64),
                    std::invalid_argument);
}

TEST_CASE("shifted chain equals the plain chain moved to the floor") {
    const DominanceParams params{0.92, 2, 5};
    const int N = suggested_truncation(params.p, params.w, 1e-13);
    const ChainDistribution plain = stationary_numeric(ChainKind::P, DominanceParams{params.p, params.w, 0}, N);
    const ChainDistribution shifted = stationary_numeric(ChainKind::Y, params, N);
    for (int i = 0; i < N; ++i)
        CHECK(std::abs(shifted.mass_at(params.eta + i) - plain.mass_at(i)) <= 1e-10);
}

TEST_CASE("floor mass of the plain chain dominates the closed-form floor") {
    for (double p : {0.85, 0.9, 0.95, 0.99})
        for (int w : {1, 2, 3, 5}) {
            if (!(p > q_chain_threshold(w))) continue;
            const ChainDistribution plain =
                stationary_numeric(ChainKind::P, DominanceParams{p, w, 0},
                                   suggested_truncation(p, w, 1e-13));
            const double pw = std::pow(p, w);
            CHECK(plain.mass_at(0) >= (2.0 * pw - 1.0) / pw - 1e-8);
        }
}

TEST_CASE("floor mass grows with p at fixed w") {
    for (int w : {1, 2, 3, 5}) {
        double previous = -1.0;
        for (double p : {0.85, 0.9, 0.95, 0.99}) {
            if (!(p > q_chain_threshold(w))) continue;
            const double pi0 = stationary_q_closed_form(p, w).mass_at(0);
            CHECK(pi0 >= previous);
            previous = pi0;
        }
    }
}

TEST_CASE("coupled paths keep the rounded chain on top") {
    // identical paths when p = 1
    const auto [p_sure, q_sure] = coupled_pq_paths(1.0, 2, 500, 77);
    CHECK(p_sure == q_sure);

    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        const auto [p_path, q_path] = coupled_pq_paths(0.85, 2, 10000, seed);
        for (std::size_t k = 0; k < p_path.size(); ++k) CHECK(q_path[k] >= p_path[k]);
    }
}

TEST_CASE("exact marginals of the floored chain") {
    // p = 1: point mass descending one step per iteration
    const DominanceParams sure{1.0, 4, 3};
    const ChainDistribution after = y_marginal_after(sure, 10, 4);
    CHECK(after.mass_at(6) == doctest::Approx(1.0));

    // one step from the floor: stay w.p. p, jump w.p. 1-p
    const DominanceParams params{0.8, 4, 3};
    const ChainDistribution one = y_marginal_after(params, 3, 1);
    CHECK(one.mass_at(3) == doctest::Approx(0.8));
    CHECK(one.mass_at(7) == doctest::Approx(0.2));
    CHECK(one.total_mass() == doctest::Approx(1.0).epsilon(1e-12));

    // marginals agree with a brute-force simulation of the same chain
    const DominanceParams sim_params{0.85, 2, 1};
    const ChainDistribution law = y_marginal_after(sim_params, 5, 12);
    const int R = 200000;
    std::vector<long> counts(static_cast<std::size_t>(law.mass.size()), 0);
    CounterRng rng(9001);
    for (int r = 0; r < R; ++r) {
        int y = 5;
        for (int k = 0; k < 12; ++k) y = y_step(sim_params, y, rng.next_double());
        ++counts[static_cast<std::size_t>(y - law.first_state)];
    }
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double freq = static_cast<double>(counts[i]) / R;
        const double m = law.mass[i];
        CHECK(std::abs(freq - m) <= 4.0 * std::sqrt(std::max(m * (1.0 - m), 1e-6) / R));
    }
}

TEST_CASE("dominance verification on a deterministic model holds with slack") {
    const FiniteMdp chain2 = iro::testing::chain2();
    ExperimentConfig cfg;
    cfg.kind = OperatorMode::Evi;
    cfg.mdp_path = "inline";
    cfg.n = 50;
    cfg.iterations = 60;
    cfg.replicas = 400;
    cfg.kappa = 0.5;
    cfg.epsilon = 0.1;
    cfg.delta = 0.45;
    cfg.master_seed = 31337;
    const Experiment exp = Experiment::make(cfg, chain2);
    const DominanceExperimentResult result = run_dominance_experiment(exp, 40);
    CHECK(result.joint.joint == 1.0);
    CHECK(result.params.p == 1.0);
    CHECK(result.report.all_pass);
    CHECK(result.report.worst_margin >= 0.0);
}

TEST_CASE("dominance verification fails under a deliberately false hypothesis") {
    // claim p = 1 although the sampled noise has a real tail at this epsilon
    const FiniteMdp noisy2 = iro::testing::noisy2();
    ExperimentConfig cfg;
    cfg.kind = OperatorMode::Evi;
    cfg.mdp_path = "inline";
    cfg.n = 20;
    cfg.iterations = 160;
    cfg.replicas = 2000;
    cfg.kappa = 0.1;
    cfg.epsilon = 0.01;
    cfg.delta = 0.35;
    cfg.master_seed = 5;
    const Experiment exp = Experiment::make(cfg, noisy2);
    const DominanceExperimentResult result = run_dominance_experiment(exp, 150, 1.0);
    CHECK_FALSE(result.report.all_pass);
    CHECK(result.report.worst_margin < 0.0);
}

TEST_CASE("dominance verification passes on a stochastic model with an honest p") {
    const FiniteMdp noisy2 = iro::testing::noisy2();
    ExperimentConfig cfg;
    cfg.kind = OperatorMode::Evi;
    cfg.mdp_path = "inline";
    cfg.n = 100;
    cfg.iterations = 60;
    cfg.replicas = 4000;
    cfg.kappa = 1.2;
    cfg.epsilon = 0.2;
    cfg.delta = 0.35;
    cfg.master_seed = 99;
    const Experiment exp = Experiment::make(cfg, noisy2);
    const DominanceExperimentResult result = run_dominance_experiment(exp, 50);
    CHECK(result.joint.joint > 0.97);
    CHECK(result.report.all_pass);
}

}  // TEST_SUITE
