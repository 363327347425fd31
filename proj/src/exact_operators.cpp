#include "iro/exact_operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace iro {

namespace {

double expected_value(const FiniteMdp& mdp, int s, int a, const ValueFunction& v) {
    auto row = mdp.kernel_row(s, a);
    double acc = 0.0;
    for (int j = 0; j < mdp.num_states(); ++j) acc += row[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(j)];
    return acc;
}

ValueFunction bellman_step(const FiniteMdp& mdp, const ValueFunction& v, double gamma) {
    if (static_cast<int>(v.size()) != mdp.num_states())
        throw std::invalid_argument("value function has wrong length");
    ValueFunction out(v.size());
    for (int s = 0; s < mdp.num_states(); ++s) {
        double best = std::numeric_limits<double>::infinity();
        for (int a = 0; a < mdp.num_actions(); ++a)
            best = std::min(best, mdp.cost(s, a) + gamma * expected_value(mdp, s, a, v));
        out[static_cast<std::size_t>(s)] = best;
    }
    return out;
}

[[noreturn]] void convergence_failure(long iterations, double residual, double tol) {
    std::ostringstream msg;
    msg << "fixed-point iteration exhausted " << iterations
        << " iterations with residual " << residual << " above tolerance " << tol;
    throw std::runtime_error(msg.str());
}

}  // namespace

ValueFunction bellman_discounted(const FiniteMdp& mdp, const ValueFunction& v) {
    if (!mdp.discount()) throw std::invalid_argument("bellman_discounted requires a discount factor");
    return bellman_step(mdp, v, *mdp.discount());
}

std::pair<ValueFunction, double> relative_bellman(const FiniteMdp& mdp, const ValueFunction& v) {
    ValueFunction out = bellman_step(mdp, v, 1.0);
    const double gain = *std::min_element(out.begin(), out.end());
    for (double& x : out) x -= gain;
    return {std::move(out), gain};
}

QFunction q_bellman(const FiniteMdp& mdp, const QFunction& q) {
    if (!mdp.discount()) throw std::invalid_argument("q_bellman requires a discount factor");
    if (q.num_states != mdp.num_states() || q.num_actions != mdp.num_actions())
        throw std::invalid_argument("Q function has wrong shape");
    const double gamma = *mdp.discount();

    ValueFunction greedy(static_cast<std::size_t>(mdp.num_states()));
    for (int j = 0; j < mdp.num_states(); ++j) greedy[static_cast<std::size_t>(j)] = q.min_over_actions(j);

    QFunction out(mdp.num_states(), mdp.num_actions());
    for (int s = 0; s < mdp.num_states(); ++s)
        for (int a = 0; a < mdp.num_actions(); ++a)
            out(s, a) = mdp.cost(s, a) + gamma * expected_value(mdp, s, a, greedy);
    return out;
}

SolveResult solve_fixed_point(const FiniteMdp& mdp, SolveKind kind, double tol, long max_iter) {
    if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
    SolveResult result;
    result.kind = kind;

    switch (kind) {
    case SolveKind::DiscountedV: {
        ValueFunction v(static_cast<std::size_t>(mdp.num_states()), 0.0);
        for (long k = 0; k < max_iter; ++k) {
            ValueFunction next = bellman_discounted(mdp, v);
            const double residual = sup_dist(next, v);
            v = std::move(next);
            if (residual <= tol) {
                result.value = std::move(v);
                result.iterations = k + 1;
                result.final_residual = residual;
                return result;
            }
            if (k + 1 == max_iter) convergence_failure(max_iter, residual, tol);
        }
        break;
    }
    case SolveKind::AverageV: {
        ValueFunction v(static_cast<std::size_t>(mdp.num_states()), 0.0);
        for (long k = 0; k < max_iter; ++k) {
            auto [next, gain] = relative_bellman(mdp, v);
            const double residual = span_dist(next, v);
            v = std::move(next);
            if (residual <= tol) {
                result.value = std::move(v);
                result.gain = gain;
                result.iterations = k + 1;
                result.final_residual = residual;
                return result;
            }
            if (k + 1 == max_iter) convergence_failure(max_iter, residual, tol);
        }
        break;
    }
    case SolveKind::DiscountedQ: {
        QFunction q(mdp.num_states(), mdp.num_actions());
        for (long k = 0; k < max_iter; ++k) {
            QFunction next = q_bellman(mdp, q);
            const double residual = sup_dist(next.values, q.values);
            q = std::move(next);
            if (residual <= tol) {
                result.qvalue = std::move(q);
                result.iterations = k + 1;
                result.final_residual = residual;
                return result;
            }
            if (k + 1 == max_iter) convergence_failure(max_iter, residual, tol);
        }
        break;
    }
    }
    throw std::logic_error("unreachable");
}

}  // namespace iro
