#pragma once

#include <optional>
#include <utility>

#include "iro/mdp.hpp"

namespace iro {

enum class SolveKind { DiscountedV, AverageV, DiscountedQ };

/// Fixed point of an exact operator, used as ground truth by the sampled
/// experiments. `value` is filled for the V kinds, `qvalue` for the Q kind,
/// `gain` only in average-cost mode.
struct SolveResult {
    SolveKind kind = SolveKind::DiscountedV;
    ValueFunction value;
    QFunction qvalue;
    std::optional<double> gain;
    long iterations = 0;
    double final_residual = 0.0;
};

/// [T(v)](s) = min_a { c(s,a) + gamma * E[v(next state)] }, expectation taken
/// exactly through the kernel. Sup-norm contraction with coefficient gamma.
ValueFunction bellman_discounted(const FiniteMdp& mdp, const ValueFunction& v);

/// Undiscounted Bellman step followed by normalization: returns
/// (Tv - min_s(Tv) * 1, min_s(Tv)). The value part has minimum exactly 0;
/// the scalar is the gain estimate. Span contraction with the unichain
/// coefficient of the kernel.
std::pair<ValueFunction, double> relative_bellman(const FiniteMdp& mdp, const ValueFunction& v);

/// [T(Q)](s,a) = c(s,a) + gamma * E[min_a' Q(next state, a')].
QFunction q_bellman(const FiniteMdp& mdp, const QFunction& q);

/// Iterates the chosen operator from zero until the residual (sup-norm for
/// the discounted kinds, span seminorm for average cost) drops to `tol`.
/// Throws if `max_iter` is exhausted first.
SolveResult solve_fixed_point(const FiniteMdp& mdp, SolveKind kind, double tol = 1e-10,
                              long max_iter = 1000000);

}  // namespace iro
