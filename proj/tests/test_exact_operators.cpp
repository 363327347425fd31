#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "iro/exact_operators.hpp"

using namespace iro;

TEST_SUITE("exact_operators") {

TEST_CASE("discounted Bellman on tiny models") {
    const FiniteMdp single(1, 1, {1.0}, {1.0}, 0.9);
    CHECK(bellman_discounted(single, {0.0}) == ValueFunction{1.0});

    const FiniteMdp chain2 = iro::testing::chain2();
    const ValueFunction image = bellman_discounted(chain2, {0.0, 0.0});
    CHECK(image[0] == doctest::Approx(0.0));
    CHECK(image[1] == doctest::Approx(1.0));

    // v* = (0,1) solves the 2x2 linear system and is fixed
    const ValueFunction fixed = bellman_discounted(chain2, {0.0, 1.0});
    CHECK(fixed[0] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(fixed[1] == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(bellman_discounted(iro::testing::uniform2(), {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("relative Bellman normalizes and reports the gain") {
    const FiniteMdp uniform2 = iro::testing::uniform2();
    auto [value, gain] = relative_bellman(uniform2, {0.0, 1.0});
    CHECK(value[0] == 0.0);
    CHECK(value[1] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(gain == doctest::Approx(0.5).epsilon(1e-14));

    // shifting the input moves the gain and leaves the value part alone
    auto [shifted_value, shifted_gain] = relative_bellman(uniform2, {3.25, 4.25});
    CHECK(shifted_value[0] == 0.0);
    CHECK(shifted_value[1] == doctest::Approx(value[1]).epsilon(1e-12));
    CHECK(shifted_gain == doctest::Approx(gain + 3.25).epsilon(1e-12));

    // the minimum of the output is exactly zero by construction
    CounterRng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const FiniteMdp mdp = iro::testing::random_mdp(rng, 4, 3, std::nullopt);
        ValueFunction v(4);
        for (double& x : v) x = 10.0 * (rng.next_double() - 0.5);
        const auto [out, g] = relative_bellman(mdp, v);
        CHECK(*std::min_element(out.begin(), out.end()) == 0.0);
    }
}

TEST_CASE("Q operator on tiny models") {
    const FiniteMdp single(1, 1, {1.0}, {1.0}, 0.5);
    QFunction q(1, 1);
    q(0, 0) = 2.0;  // Q* = c / (1 - gamma)
    CHECK(q_bellman(single, q)(0, 0) == doctest::Approx(2.0).epsilon(1e-14));

    QFunction zero(1, 1);
    CHECK(q_bellman(single, zero)(0, 0) == doctest::Approx(1.0));

    // brute-force expansion of the expectation over the two-state kernel
    const FiniteMdp mdp = iro::testing::chain2_two_actions();
    QFunction input(2, 2);
    input(0, 0) = 0.3;
    input(0, 1) = -0.2;
    input(1, 0) = 1.4;
    input(1, 1) = 0.9;
    const QFunction out = q_bellman(mdp, input);
    const double gamma = *mdp.discount();
    for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 2; ++a) {
            double expected = 0.0;
            for (int j = 0; j < 2; ++j)
                expected += mdp.kernel(s, a, j) * std::min(input(j, 0), input(j, 1));
            CHECK(out(s, a) == doctest::Approx(mdp.cost(s, a) + gamma * expected).epsilon(1e-14));
        }
}

TEST_CASE("solve_fixed_point on the reference models") {
    const FiniteMdp single(1, 1, {1.0}, {1.0}, 0.9);
    const SolveResult geometric = solve_fixed_point(single, SolveKind::DiscountedV);
    CHECK(geometric.value[0] == doctest::Approx(10.0).epsilon(1e-9));
    CHECK(geometric.final_residual <= 1e-10);

    const SolveResult chain2 = solve_fixed_point(iro::testing::chain2(), SolveKind::DiscountedV);
    CHECK(chain2.value[0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(chain2.value[1] == doctest::Approx(1.0).epsilon(1e-12));

    const SolveResult average = solve_fixed_point(iro::testing::uniform2(), SolveKind::AverageV);
    CHECK(average.gain.value() == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(span_seminorm(average.value) == doctest::Approx(1.0).epsilon(1e-10));

    CHECK_THROWS_AS(solve_fixed_point(single, SolveKind::DiscountedV, 1e-12, 3), std::runtime_error);
}

TEST_CASE("contraction of the exact operators on random inputs") {
    CounterRng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const FiniteMdp mdp = iro::testing::random_mdp(rng, 4, 2, 0.5 + 0.4 * rng.next_double());
        const double gamma = *mdp.discount();
        const ValueFunction v1 = iro::testing::random_value_in_space(rng, mdp);
        const ValueFunction v2 = iro::testing::random_value_in_space(rng, mdp);
        CHECK(sup_dist(bellman_discounted(mdp, v1), bellman_discounted(mdp, v2)) <=
              gamma * sup_dist(v1, v2) + 1e-12);

        const QFunction q1 = iro::testing::random_q_in_space(rng, mdp);
        const QFunction q2 = iro::testing::random_q_in_space(rng, mdp);
        CHECK(sup_dist(q_bellman(mdp, q1).values, q_bellman(mdp, q2).values) <=
              gamma * sup_dist(q1.values, q2.values) + 1e-12);
    }
    for (int trial = 0; trial < 100; ++trial) {
        const FiniteMdp mdp = iro::testing::random_mdp(rng, 4, 2, std::nullopt);
        const double alpha = unichain_coefficient(mdp);
        ValueFunction v1(4), v2(4);
        for (double& x : v1) x = 10.0 * (rng.next_double() - 0.5);
        for (double& x : v2) x = 10.0 * (rng.next_double() - 0.5);
        CHECK(span_dist(relative_bellman(mdp, v1).first, relative_bellman(mdp, v2).first) <=
              alpha * span_dist(v1, v2) + 1e-12);
    }
}

TEST_CASE("geometric residual decay of discounted value iteration") {
    const FiniteMdp mdp = iro::testing::ring3();
    const double gamma = *mdp.discount();
    ValueFunction v(3, 0.0);
    double prev_residual = -1.0;
    for (int k = 0; k < 120; ++k) {
        ValueFunction next = bellman_discounted(mdp, v);
        const double residual = sup_dist(next, v);
        if (prev_residual > 1e-10) CHECK(residual / prev_residual <= gamma + 1e-9);
        prev_residual = residual;
        v = next;
    }
}

TEST_CASE("Q and V solutions agree state by state") {
    for (const FiniteMdp& mdp : {iro::testing::chain2_two_actions(), iro::testing::ring3()}) {
        const SolveResult v = solve_fixed_point(mdp, SolveKind::DiscountedV, 1e-12);
        const SolveResult q = solve_fixed_point(mdp, SolveKind::DiscountedQ, 1e-12);
        for (int s = 0; s < mdp.num_states(); ++s)
            CHECK(q.qvalue.min_over_actions(s) == doctest::Approx(v.value[static_cast<std::size_t>(s)]).epsilon(1e-9));
    }
}

TEST_CASE("average-cost solver is shift equivariant") {
    const FiniteMdp mdp = iro::testing::skew2();
    const ValueFunction v{0.4, 1.9};
    const auto [base_value, base_gain] = relative_bellman(mdp, v);
    ValueFunction shifted = v;
    for (double& x : shifted) x += 2.5;
    const auto [s_value, s_gain] = relative_bellman(mdp, shifted);
    CHECK(sup_dist(base_value, s_value) < 1e-12);
    CHECK(s_gain == doctest::Approx(base_gain + 2.5).epsilon(1e-12));
}

}  // TEST_SUITE
