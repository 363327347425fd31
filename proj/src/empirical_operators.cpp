#include "iro/empirical_operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace iro {

namespace {

void check_batch(const SampleBatch& batch) {
    if (batch.empty()) throw std::invalid_argument("sample batch must be nonempty");
}

double sample_mean_value(std::span<const double> cumulative_row, std::span<const double> values,
                         const SampleBatch& batch) {
    double acc = 0.0;
    for (double u : batch.draws) acc += values[static_cast<std::size_t>(state_from_uniform(cumulative_row, u))];
    return acc / static_cast<double>(batch.draws.size());
}

ValueFunction empirical_bellman_step(const FiniteMdp& mdp, const ValueFunction& v,
                                     const SampleBatch& batch, double gamma) {
    if (static_cast<int>(v.size()) != mdp.num_states())
        throw std::invalid_argument("value function has wrong length");
    check_batch(batch);
    ValueFunction out(v.size());
    for (int s = 0; s < mdp.num_states(); ++s) {
        double best = std::numeric_limits<double>::infinity();
        for (int a = 0; a < mdp.num_actions(); ++a)
            best = std::min(best, mdp.cost(s, a) + gamma * sample_mean_value(mdp.cumulative_row(s, a), v, batch));
        out[static_cast<std::size_t>(s)] = best;
    }
    return out;
}

void clip_to_value_space(const FiniteMdp& mdp, std::span<double> values) {
    const double bound = mdp.value_bound();
    for (double& x : values) x = std::clamp(x, -bound, bound);
}

}  // namespace

ValueFunction empirical_bellman(const FiniteMdp& mdp, const ValueFunction& v, const SampleBatch& batch) {
    if (!mdp.discount()) throw std::invalid_argument("empirical_bellman requires a discount factor");
    ValueFunction out = empirical_bellman_step(mdp, v, batch, *mdp.discount());
    clip_to_value_space(mdp, out);
    return out;
}

std::pair<ValueFunction, double> empirical_relative_bellman(const FiniteMdp& mdp,
                                                            const ValueFunction& v,
                                                            const SampleBatch& batch) {
    ValueFunction out = empirical_bellman_step(mdp, v, batch, 1.0);
    const double gain = *std::min_element(out.begin(), out.end());
    for (double& x : out) x -= gain;
    return {std::move(out), gain};
}

QFunction empirical_q(const FiniteMdp& mdp, const QFunction& q, const SampleBatch& batch) {
    if (!mdp.discount()) throw std::invalid_argument("empirical_q requires a discount factor");
    if (q.num_states != mdp.num_states() || q.num_actions != mdp.num_actions())
        throw std::invalid_argument("Q function has wrong shape");
    check_batch(batch);
    const double gamma = *mdp.discount();

    ValueFunction greedy(static_cast<std::size_t>(mdp.num_states()));
    for (int j = 0; j < mdp.num_states(); ++j) greedy[static_cast<std::size_t>(j)] = q.min_over_actions(j);

    QFunction out(mdp.num_states(), mdp.num_actions());
    for (int s = 0; s < mdp.num_states(); ++s)
        for (int a = 0; a < mdp.num_actions(); ++a)
            out(s, a) = mdp.cost(s, a) + gamma * sample_mean_value(mdp.cumulative_row(s, a), greedy, batch);
    clip_to_value_space(mdp, out.values);
    return out;
}

std::vector<double> empirical_kernel_row(const FiniteMdp& mdp, int s, int a, const SampleBatch& batch) {
    if (s < 0 || s >= mdp.num_states()) throw std::out_of_range("state index out of range");
    if (a < 0 || a >= mdp.num_actions()) throw std::out_of_range("action index out of range");
    check_batch(batch);
    auto cum = mdp.cumulative_row(s, a);
    std::vector<long> counts(static_cast<std::size_t>(mdp.num_states()), 0);
    for (double u : batch.draws) ++counts[static_cast<std::size_t>(state_from_uniform(cum, u))];
    std::vector<double> row(counts.size());
    const double n = static_cast<double>(batch.draws.size());
    for (std::size_t j = 0; j < counts.size(); ++j) row[j] = static_cast<double>(counts[j]) / n;
    return row;
}

std::vector<double> empirical_kernel(const FiniteMdp& mdp, const SampleBatch& batch) {
    std::vector<double> tensor;
    tensor.reserve(static_cast<std::size_t>(mdp.num_states()) * mdp.num_actions() * mdp.num_states());
    for (int s = 0; s < mdp.num_states(); ++s)
        for (int a = 0; a < mdp.num_actions(); ++a) {
            auto row = empirical_kernel_row(mdp, s, a, batch);
            tensor.insert(tensor.end(), row.begin(), row.end());
        }
    return tensor;
}

double empirical_span_coefficient(std::span<const double> p_hat, int num_rows, int num_states) {
    return unichain_coefficient(p_hat, num_rows, num_states);
}

void SgdProblem::validate() const {
    if (dimension <= 0) throw std::invalid_argument("dimension must be positive");
    if (static_cast<int>(target_mean.size()) != dimension)
        throw std::invalid_argument("target_mean has wrong length");
    if (!(step_size > 0.0 && step_size < 2.0))
        throw std::invalid_argument("step size must lie in (0,2) for a contractive mean map");
}

std::vector<double> sgd_step(const SgdProblem& problem, const std::vector<double>& x,
                             const SampleBatch& batch) {
    problem.validate();
    if (static_cast<int>(x.size()) != problem.dimension)
        throw std::invalid_argument("iterate has wrong dimension");
    check_batch(batch);
    double mean_u = 0.0;
    for (double u : batch.draws) mean_u += u;
    mean_u /= static_cast<double>(batch.draws.size());
    // Gradient of 0.5*||x - h(W)||^2 averaged over the batch is x - mean h(W).
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double h_mean = problem.target_mean[i] + (mean_u - 0.5);
        out[i] = x[i] - problem.step_size * (x[i] - h_mean);
    }
    return out;
}

namespace {

double euclidean_dist(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

}  // namespace

Trajectory run_iterated(const FiniteMdp& mdp, SolveKind kind, const SolveResult& oracle, int n,
                        int num_iterations, std::uint64_t master_seed, std::uint64_t replica,
                        bool record_iterates) {
    if (n <= 0) throw std::invalid_argument("sample size must be positive");
    if (num_iterations < 0) throw std::invalid_argument("iteration count must be nonnegative");
    if (oracle.kind != kind) throw std::invalid_argument("oracle solves a different operator kind");

    Trajectory traj;
    traj.errors.reserve(static_cast<std::size_t>(num_iterations) + 1);
    SampleBatch batch;

    if (kind == SolveKind::DiscountedQ) {
        QFunction q(mdp.num_states(), mdp.num_actions());
        traj.errors.push_back(sup_dist(q.values, oracle.qvalue.values));
        if (record_iterates) traj.iterates.push_back(q.values);
        for (int k = 0; k < num_iterations; ++k) {
            fill_batch({master_seed, replica, static_cast<std::uint64_t>(k)}, n, batch);
            q = empirical_q(mdp, q, batch);
            traj.errors.push_back(sup_dist(q.values, oracle.qvalue.values));
            if (record_iterates) traj.iterates.push_back(q.values);
        }
        return traj;
    }

    ValueFunction v(static_cast<std::size_t>(mdp.num_states()), 0.0);
    const bool average = kind == SolveKind::AverageV;
    auto error = [&](const ValueFunction& x) {
        return average ? span_dist(x, oracle.value) : sup_dist(x, oracle.value);
    };
    traj.errors.push_back(error(v));
    if (record_iterates) traj.iterates.push_back(v);
    for (int k = 0; k < num_iterations; ++k) {
        fill_batch({master_seed, replica, static_cast<std::uint64_t>(k)}, n, batch);
        if (average) {
            auto [next, gain] = empirical_relative_bellman(mdp, v, batch);
            v = std::move(next);
            traj.gains.push_back(gain);
        } else {
            v = empirical_bellman(mdp, v, batch);
        }
        traj.errors.push_back(error(v));
        if (record_iterates) traj.iterates.push_back(v);
    }
    return traj;
}

Trajectory run_iterated_sgd(const SgdProblem& problem, const std::vector<double>& x0, int n,
                            int num_iterations, std::uint64_t master_seed, std::uint64_t replica,
                            bool record_iterates) {
    problem.validate();
    if (n <= 0) throw std::invalid_argument("sample size must be positive");
    if (num_iterations < 0) throw std::invalid_argument("iteration count must be nonnegative");
    if (static_cast<int>(x0.size()) != problem.dimension)
        throw std::invalid_argument("initial point has wrong dimension");

    Trajectory traj;
    traj.errors.reserve(static_cast<std::size_t>(num_iterations) + 1);
    std::vector<double> x = x0;
    traj.errors.push_back(euclidean_dist(x, problem.target_mean));
    if (record_iterates) traj.iterates.push_back(x);
    SampleBatch batch;
    for (int k = 0; k < num_iterations; ++k) {
        fill_batch({master_seed, replica, static_cast<std::uint64_t>(k)}, n, batch);
        x = sgd_step(problem, x, batch);
        traj.errors.push_back(euclidean_dist(x, problem.target_mean));
        if (record_iterates) traj.iterates.push_back(x);
    }
    return traj;
}

}  // namespace iro
