#pragma once

#include <vector>

#include "iro/mdp.hpp"
#include "iro/rng.hpp"

namespace iro::testing {

/// Two states, one action, costs (0,1), both states jump to state 0 surely,
/// discount 1/2. Fixed point of the discounted operator is v* = (0,1).
inline FiniteMdp chain2() {
    return FiniteMdp(2, 1, {0.0, 1.0}, {1.0, 0.0, 1.0, 0.0}, 0.5);
}

/// chain2 with a second action that jumps to state 1 instead, at cost 0.5
/// from either state.
inline FiniteMdp chain2_two_actions() {
    return FiniteMdp(2, 2,
                     {0.0, 0.5,    // state 0: stay-at-0 action, go-to-1 action
                      1.0, 0.5},   // state 1
                     {1.0, 0.0, 0.0, 1.0,    // state 0: action 0 -> 0, action 1 -> 1
                      1.0, 0.0, 0.0, 1.0},   // state 1
                     0.5);
}

/// Two states, one action, costs (0,1), both rows uniform. Average-cost
/// optimality gives gain 1/2 and normalized v* = (0,1).
inline FiniteMdp uniform2() {
    return FiniteMdp(2, 1, {0.0, 1.0}, {0.5, 0.5, 0.5, 0.5}, std::nullopt);
}

/// Two states, one action, genuinely distinct stochastic rows; the span
/// contraction coefficient is 1 - (0.5 + 0.2) = 0.3. Undiscounted.
inline FiniteMdp skew2() {
    return FiniteMdp(2, 1, {0.0, 1.0}, {0.5, 0.5, 0.8, 0.2}, std::nullopt);
}

/// skew2 with a discount, for sampled experiments whose noise never
/// vanishes.
inline FiniteMdp noisy2(double discount = 0.6) {
    return FiniteMdp(2, 1, {0.0, 1.0}, {0.5, 0.5, 0.8, 0.2}, discount);
}

/// Three states, two actions, cyclic stochastic transitions, discount 0.8.
/// The workhorse for sampled value- and Q-iteration experiments.
inline FiniteMdp ring3() {
    const std::vector<double> cost{
        0.2, 0.5,   // state 0
        1.0, 0.3,   // state 1
        0.4, 0.9};  // state 2
    // action 0 mostly stays, action 1 mostly advances around the ring
    std::vector<double> kernel;
    for (int s = 0; s < 3; ++s) {
        const int next = (s + 1) % 3;
        const int prev = (s + 2) % 3;
        std::vector<double> stay(3, 0.0), move(3, 0.0);
        stay[static_cast<std::size_t>(s)] = 0.6;
        stay[static_cast<std::size_t>(next)] = 0.3;
        stay[static_cast<std::size_t>(prev)] = 0.1;
        move[static_cast<std::size_t>(s)] = 0.1;
        move[static_cast<std::size_t>(next)] = 0.7;
        move[static_cast<std::size_t>(prev)] = 0.2;
        kernel.insert(kernel.end(), stay.begin(), stay.end());
        kernel.insert(kernel.end(), move.begin(), move.end());
    }
    return FiniteMdp(3, 2, cost, kernel, 0.8);
}

/// Random MDP with rows drawn from a Dirichlet-like normalization of
/// uniforms and costs in [0,1].
inline FiniteMdp random_mdp(CounterRng& rng, int num_states, int num_actions,
                            std::optional<double> discount) {
    std::vector<double> cost(static_cast<std::size_t>(num_states) * num_actions);
    for (double& c : cost) c = rng.next_double();
    std::vector<double> kernel;
    kernel.reserve(cost.size() * static_cast<std::size_t>(num_states));
    for (std::size_t row = 0; row < cost.size(); ++row) {
        std::vector<double> weights(static_cast<std::size_t>(num_states));
        double sum = 0.0;
        for (double& x : weights) {
            x = 0.05 + rng.next_double();
            sum += x;
        }
        for (double x : weights) kernel.push_back(x / sum);
    }
    return FiniteMdp(num_states, num_actions, std::move(cost), std::move(kernel), discount);
}

/// Random value function inside the bounded space of the discounted MDP.
inline ValueFunction random_value_in_space(CounterRng& rng, const FiniteMdp& mdp) {
    const double bound = mdp.value_bound();
    ValueFunction v(static_cast<std::size_t>(mdp.num_states()));
    for (double& x : v) x = bound * (2.0 * rng.next_double() - 1.0);
    return v;
}

/// Random Q function inside the same bounded space.
inline QFunction random_q_in_space(CounterRng& rng, const FiniteMdp& mdp) {
    const double bound = mdp.value_bound();
    QFunction q(mdp.num_states(), mdp.num_actions());
    for (double& x : q.values) x = bound * (2.0 * rng.next_double() - 1.0);
    return q;
}

}  // namespace iro::testing
