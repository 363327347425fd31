#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "iro/exact_operators.hpp"
#include "iro/mdp.hpp"
#include "iro/rng.hpp"

namespace iro {

/// Sampled Bellman step: [T(v)](s) = min_a { c(s,a) + (gamma/n) sum_i v(f(s,a,u_i)) }
/// with one shared batch for every (s,a). The result is clipped to the
/// value-space radius ||c||/(1-gamma) so iterates stay in the bounded space;
/// clipping never moves a point whose input already lies inside it. For a
/// fixed batch the map is a gamma-contraction in sup norm.
ValueFunction empirical_bellman(const FiniteMdp& mdp, const ValueFunction& v, const SampleBatch& batch);

/// Sampled undiscounted Bellman step followed by normalization, as in
/// relative_bellman. Returns (value with minimum exactly 0, gain estimate).
std::pair<ValueFunction, double> empirical_relative_bellman(const FiniteMdp& mdp,
                                                            const ValueFunction& v,
                                                            const SampleBatch& batch);

/// Sampled Q step: [T(Q)](s,a) = c(s,a) + (gamma/n) sum_i min_a' Q(f(s,a,u_i), a').
/// Clipped like empirical_bellman.
QFunction empirical_q(const FiniteMdp& mdp, const QFunction& q, const SampleBatch& batch);

/// Empirical transition row: fraction of batch draws mapped to each next
/// state by the inverse-CDF dynamics of row (s,a). Entries are counts/n.
std::vector<double> empirical_kernel_row(const FiniteMdp& mdp, int s, int a, const SampleBatch& batch);

/// Empirical kernel for all (s,a) rows from one shared batch, laid out like
/// FiniteMdp::kernel_tensor().
std::vector<double> empirical_kernel(const FiniteMdp& mdp, const SampleBatch& batch);

/// Span-contraction coefficient of a sampled operator: the unichain
/// coefficient of its empirical kernel.
double empirical_span_coefficient(std::span<const double> p_hat, int num_rows, int num_states);

/// Quadratic stochastic-gradient family: minimize E[ 0.5 * ||x - h(W)||^2 ]
/// with h(W) = target_mean + (W - 1/2) * 1 and W uniform on [0,1], so the
/// minimizer is target_mean and the mean update map T(x) = x - beta (x - x*)
/// contracts with coefficient |1 - beta|.
struct SgdProblem {
    int dimension = 1;
    std::vector<double> target_mean;
    double step_size = 0.5;

    void validate() const;
};

/// One batch gradient step: x - (beta/n) sum_i (x - h(u_i)).
std::vector<double> sgd_step(const SgdProblem& problem, const std::vector<double>& x,
                             const SampleBatch& batch);

/// One run of the iterated random operator, recording the error
/// rho(iterate, fixed point) after every application. The metric is the sup
/// norm for the discounted kinds and the span seminorm in average-cost mode.
struct Trajectory {
    /// errors[k] for k = 0..K; errors[0] is the initial error.
    std::vector<double> errors;
    /// Average-cost mode only: gain estimate from each application.
    std::vector<double> gains;
    /// Filled only when recording was requested (flattened iterates).
    std::vector<std::vector<double>> iterates;
};

/// Drives iterate <- sampled_operator(iterate) for `num_iterations` steps
/// starting from zero, with the batch at step k drawn from stream
/// (master_seed, replica, k). `oracle` must be the solved fixed point of the
/// matching exact operator.
Trajectory run_iterated(const FiniteMdp& mdp, SolveKind kind, const SolveResult& oracle, int n,
                        int num_iterations, std::uint64_t master_seed, std::uint64_t replica,
                        bool record_iterates = false);

/// SGD counterpart; the fixed point is the problem's target mean and the
/// error metric is the Euclidean distance.
Trajectory run_iterated_sgd(const SgdProblem& problem, const std::vector<double>& x0, int n,
                            int num_iterations, std::uint64_t master_seed, std::uint64_t replica,
                            bool record_iterates = false);

}  // namespace iro
