#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fixtures.hpp"
#include "iro/bounds.hpp"
#include "iro/empirical_operators.hpp"

using namespace iro;

TEST_SUITE("bounds") {

TEST_CASE("joint lower bound from marginals") {
    CHECK(frechet_hoeffding_lower(1.0, 1.0) == 1.0);
    CHECK(frechet_hoeffding_lower(0.9, 0.95) == doctest::Approx(0.85).epsilon(1e-15));
    CHECK(frechet_hoeffding_lower(0.4, 0.4) == 0.0);
    CounterRng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        const double m1 = rng.next_double();
        const double m2 = rng.next_double();
        CHECK(frechet_hoeffding_lower(m1, m2) <= std::min(m1, m2) + 1e-15);
    }
    CHECK_THROWS_AS(frechet_hoeffding_lower(-0.1, 0.5), std::invalid_argument);
}

TEST_CASE("noise tail bound arithmetic") {
    BoundInputs inputs;
    inputs.kappa = 1.0;
    inputs.epsilon = 0.25;
    inputs.delta = 0.05;
    inputs.alpha = 0.9;
    inputs.wbar = 18.0;
    inputs.cost_sup = 1.0;
    inputs.num_states = 3;
    inputs.num_actions = 2;

    inputs.n = 0;
    CHECK(hoeffding_w_tail(inputs) == doctest::Approx(12.0));

    inputs.n = 300000;
    const double gamma2 = hoeffding_w_tail(inputs);
    CHECK(gamma2 == doctest::Approx(3.12e-5).epsilon(2e-3));

    // doubling n squares the exponential factor
    BoundInputs doubled = inputs;
    doubled.n = 2 * inputs.n;
    CHECK(hoeffding_w_tail(doubled) ==
          doctest::Approx(gamma2 * gamma2 / 12.0).epsilon(1e-9));
}

TEST_CASE("success probability and tail bound") {
    CHECK(p_n(0.0, 0.0) == 1.0);
    CHECK(p_n(0.01, 0.02) == doctest::Approx(0.97).epsilon(1e-15));
    CHECK(p_n(0.8, 0.9) == 0.0);  // clipped

    CHECK(tail_bound(1.0, 5) == 0.0);
    CHECK(tail_bound(0.95, 3) == doctest::Approx(0.166351).epsilon(1e-5));
    CHECK_THROWS_AS(tail_bound(0.0, 2), std::invalid_argument);

    // 1 - floor mass equals the tail bound identically
    for (double p : {0.7, 0.85, 0.9, 0.99})
        for (int w : {1, 2, 3, 5, 8}) {
            const double pw = std::pow(p, w);
            CHECK(std::abs((1.0 - (2.0 * pw - 1.0) / pw) - tail_bound(p, w)) <= 1e-12);
        }
}

TEST_CASE("chain thresholds") {
    CHECK(thresholds(1).first == doctest::Approx(0.5));
    CHECK(thresholds(1).second == doctest::Approx(2.0 / 3.0));
    CHECK(thresholds(2).first == doctest::Approx(2.0 / 3.0));
    CHECK(thresholds(2).second == doctest::Approx(0.8));
    for (int w = 1; w <= 100; ++w) {
        const auto [p_thr, q_thr] = thresholds(w);
        CHECK(q_thr > p_thr);
        // just above the rounded-chain threshold, p^w clears 0.606
        const double p = q_thr + 1e-6;
        CHECK(std::pow(p, w) > 0.606);
    }
    CHECK(std::pow(0.81, 2) > 0.606);
}

TEST_CASE("sample complexity inverts its defining inequality") {
    const double kappa = 1.0, confidence = 0.1, alpha = 0.9, cost_sup = 1.0;
    const int S = 3, A = 2;
    const long N = sample_complexity_discounted(kappa, confidence, alpha, cost_sup, S, A);

    const long w = static_cast<long>(std::ceil(8.0 * cost_sup / ((1.0 - alpha) * kappa)));
    const double target = 1.0 - std::pow(1.0 / (1.0 + confidence), 1.0 / static_cast<double>(w));
    auto lhs = [&](long n) {
        return 2.0 * S * A *
               std::exp(-kappa * kappa * (1.0 - alpha) * (1.0 - alpha) * static_cast<double>(n) /
                        (32.0 * alpha * alpha * S * S * cost_sup * cost_sup));
    };
    CHECK(lhs(N) <= target);
    CHECK(lhs(N - 1) > target);

    // independent oracle: linear scan from below over a coarse then fine grid
    long scan = N > 2000 ? N - 2000 : 1;
    while (lhs(scan) > target) ++scan;
    CHECK(scan == N);

    // the implied certificate meets the requested confidence
    const double p = 1.0 - lhs(N);
    CHECK(tail_bound(p, static_cast<int>(w)) <= confidence + 1e-12);

    // a vacuous confidence level needs almost no samples
    CHECK(sample_complexity_discounted(kappa, 1e9, alpha, cost_sup, S, A) <=
          sample_complexity_discounted(kappa, 0.5, alpha, cost_sup, S, A));

    // halving kappa at least quadruples the requirement
    CHECK(sample_complexity_discounted(kappa / 2, confidence, alpha, cost_sup, S, A) >=
          4 * sample_complexity_discounted(kappa, confidence, alpha, cost_sup, S, A));
}

TEST_CASE("almost-sure noise bounds") {
    CHECK(wbar_q(0.5, 2.0) == doctest::Approx(2.0));
    CHECK(wbar_discounted_v(0.9, 1.0) == doctest::Approx(18.0));

    // the bound really dominates sampled one-step noise at the fixed point
    const FiniteMdp mdp = iro::testing::random_mdp_gamma09();
    const SolveResult oracle = solve_fixed_point(mdp, SolveKind::DiscountedV, 1e-12);
    const double wbar = wbar_discounted_v(*mdp.discount(), mdp.cost_sup());
    double worst = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const SampleBatch batch = draw_batch({4242, static_cast<std::uint64_t>(i), 0}, 8);
        const ValueFunction applied = empirical_bellman(mdp, oracle.value, batch);
        worst = std::max(worst, sup_dist(applied, oracle.value));
    }
    CHECK(worst <= wbar);

    // deterministic dynamics have no noise at all
    const FiniteMdp chain2 = iro::testing::chain2();
    const SolveResult chain_oracle = solve_fixed_point(chain2, SolveKind::DiscountedV, 1e-12);
    const SampleBatch batch = draw_batch({1, 0, 0}, 16);
    CHECK(sup_dist(empirical_bellman(chain2, chain_oracle.value, batch), chain_oracle.value) <=
          1e-12);
}

TEST_CASE("drift constant") {
    const FiniteMdp mdp(1, 1, {1.0}, {1.0}, 0.9);
    CHECK(drift_constant_discounted(mdp) == doctest::Approx(20.0));

    const FiniteMdp zero_cost(1, 1, {0.0}, {1.0}, 0.9);
    CHECK(drift_constant_discounted(zero_cost) == 0.0);

    const FiniteMdp scaled(1, 1, {3.0}, {1.0}, 0.9);
    CHECK(drift_constant_discounted(scaled) == doctest::Approx(3.0 * 20.0));
}

TEST_CASE("certificate assembly and monotonicity in n") {
    BoundInputs inputs;
    inputs.kappa = 2.0;
    inputs.epsilon = 0.4;
    inputs.delta = 0.45;
    inputs.alpha = 0.5;
    inputs.wbar = 2.0;
    inputs.cost_sup = 1.0;
    inputs.num_states = 2;
    inputs.num_actions = 1;

    double previous_bound = std::numeric_limits<double>::infinity();
    bool seen_valid = false;
    for (long n : {100L, 500L, 2000L, 10000L}) {
        inputs.n = n;
        const TailCertificate cert = make_certificate(inputs);
        CHECK(cert.w == 5);
        if (cert.valid) {
            seen_valid = true;
            CHECK(cert.p > 2.0 * cert.w / (2.0 * cert.w + 1.0));
            CHECK(std::pow(cert.p, cert.w) > 1.0 / std::sqrt(std::exp(1.0)));
            CHECK(cert.bound <= previous_bound + 1e-15);
            previous_bound = cert.bound;
        }
    }
    CHECK(seen_valid);

    // invariant violations are rejected
    BoundInputs bad = inputs;
    bad.n = 100;
    bad.epsilon = 1.5;  // above kappa/2
    CHECK_THROWS_AS(make_certificate(bad), std::invalid_argument);
    bad = inputs;
    bad.delta = 0.1;  // ceil(2/delta) = 20 > kappa/epsilon = 5
    CHECK_THROWS_AS(make_certificate(bad), std::invalid_argument);
}

}  // TEST_SUITE
