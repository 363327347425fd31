#include "iro/dominance_chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "iro/rng.hpp"

namespace iro {

void DominanceParams::validate() const {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in (0,1]");
    if (w < 1) throw std::invalid_argument("up-jump size w must be at least 1");
    if (eta < 0) throw std::invalid_argument("floor eta must be nonnegative");
}

double ChainDistribution::total_mass() const {
    return std::accumulate(mass.begin(), mass.end(), 0.0);
}

double ChainDistribution::upper_tail(double q) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < mass.size(); ++i)
        if (static_cast<double>(first_state + static_cast<int>(i)) >= q) acc += mass[i];
    return acc;
}

int y_step(const DominanceParams& params, int y, double u) {
    params.validate();
    if (y < params.eta) throw std::invalid_argument("chain state below the floor");
    if (u < params.p) return std::max(params.eta, y - 1);
    return y + params.w;
}

int p_step(double p, int w, int q, double u) {
    if (q < 0) throw std::invalid_argument("chain state must be nonnegative");
    if (u < p) return std::max(0, q - 1);
    return q + w;
}

int q_step(double p, int w, int q, double u) {
    if (q < 0) throw std::invalid_argument("chain state must be nonnegative");
    if (u < p) return std::max(0, q - 1);
    return w * ((q + w - 1) / w + 1);
}

double p_chain_threshold(int w) { return static_cast<double>(w) / (w + 1); }
double q_chain_threshold(int w) { return 2.0 * w / (2.0 * w + 1); }

ChainDistribution stationary_q_closed_form(double p, int w, double tail_cap) {
    if (w < 1) throw std::invalid_argument("up-jump size w must be at least 1");
    if (!(p > q_chain_threshold(w) && p <= 1.0))
        throw std::invalid_argument("stationary distribution requires p > 2w/(2w+1)");
    if (!(tail_cap > 0.0)) throw std::invalid_argument("tail cap must be positive");

    const double pw = std::pow(p, w);
    const double pi0 = (2.0 * pw - 1.0) / pw;
    const double ratio = (1.0 - pw) / pw;  // mass of block n+1 relative to block n

    // Block n covers states n*w+1 .. n*w+w and carries mass pi0 * ratio^(n+1).
    // Keep blocks until the remaining geometric tail drops below the cap.
    int blocks = 0;
    double tail = 1.0 - pi0;  // mass beyond state 0
    while (tail > tail_cap && blocks < 100000) {
        tail *= ratio;
        ++blocks;
    }

    ChainDistribution dist;
    dist.first_state = 0;
    dist.mass.resize(static_cast<std::size_t>(1 + blocks * w), 0.0);
    dist.mass[0] = pi0;
    double block_factor = 1.0;  // (1 - p^w)^n
    double inv_power = 1.0;     // p^-(n*w + i), advanced one state at a time
    std::size_t idx = 1;
    for (int n = 0; n < blocks; ++n) {
        for (int i = 1; i <= w; ++i) {
            inv_power /= p;
            dist.mass[idx++] = pi0 * (1.0 - p) * inv_power * block_factor;
        }
        block_factor *= 1.0 - pw;
    }
    dist.truncation_tail = tail;
    return dist;
}

int suggested_truncation(double p, int w, double tail_cap) {
    const double pw = std::pow(p, w);
    const double ratio = (1.0 - pw) / pw;
    const double pi0 = (2.0 * pw - 1.0) / pw;
    int blocks = 1;
    double tail = 1.0 - pi0;
    while (tail > tail_cap && blocks < 100000) {
        tail *= ratio;
        ++blocks;
    }
    return 1 + blocks * w;
}

ChainDistribution stationary_numeric(ChainKind kind, const DominanceParams& params,
                                     int truncation_size, double tol, long max_iter) {
    params.validate();
    if (truncation_size < 2) throw std::invalid_argument("truncation size must be at least 2");
    const double threshold =
        kind == ChainKind::Q ? q_chain_threshold(params.w) : p_chain_threshold(params.w);
    if (!(params.p > threshold))
        throw std::invalid_argument("p below the chain's invariant-distribution threshold");

    const int N = truncation_size;
    const int offset = kind == ChainKind::Y ? params.eta : 0;
    // Sparse one-step kernel: from local index i, down to `down[i]` w.p. p and
    // up to `up[i]` w.p. 1-p, with off-window jumps reflected to the top state.
    std::vector<int> down(static_cast<std::size_t>(N));
    std::vector<int> up(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        down[static_cast<std::size_t>(i)] = std::max(0, i - 1);
        int target;
        if (kind == ChainKind::Q) {
            const int state = i;  // Q lives on 0..N-1 directly
            target = params.w * ((state + params.w - 1) / params.w + 1);
        } else {
            target = i + params.w;
        }
        up[static_cast<std::size_t>(i)] = std::min(target, N - 1);
    }

    std::vector<double> pi(static_cast<std::size_t>(N), 1.0 / N);
    std::vector<double> next(static_cast<std::size_t>(N));
    const double p = params.p;
    double residual = 0.0;
    for (long iter = 0; iter < max_iter; ++iter) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int i = 0; i < N; ++i) {
            const double m = pi[static_cast<std::size_t>(i)];
            next[static_cast<std::size_t>(down[static_cast<std::size_t>(i)])] += p * m;
            next[static_cast<std::size_t>(up[static_cast<std::size_t>(i)])] += (1.0 - p) * m;
        }
        residual = 0.0;
        for (int i = 0; i < N; ++i) residual += std::abs(next[static_cast<std::size_t>(i)] - pi[static_cast<std::size_t>(i)]);
        pi.swap(next);
        if (residual <= tol) {
            ChainDistribution dist;
            dist.first_state = offset;
            dist.mass = std::move(pi);
            dist.truncation_tail = 0.0;
            return dist;
        }
    }
    std::ostringstream msg;
    msg << "power iteration did not reach residual " << tol << " within " << max_iter
        << " sweeps (last residual " << residual << ")";
    throw std::runtime_error(msg.str());
}

std::pair<std::vector<int>, std::vector<int>> coupled_pq_paths(double p, int w, int num_steps,
                                                               std::uint64_t seed, int start) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in (0,1]");
    if (w < 1) throw std::invalid_argument("up-jump size w must be at least 1");
    if (num_steps < 0) throw std::invalid_argument("path length must be nonnegative");
    if (start < 0) throw std::invalid_argument("start state must be nonnegative");

    std::vector<int> p_path(static_cast<std::size_t>(num_steps) + 1);
    std::vector<int> q_path(static_cast<std::size_t>(num_steps) + 1);
    p_path[0] = start;
    q_path[0] = start;
    CounterRng rng(seed);
    for (int k = 0; k < num_steps; ++k) {
        const double u = rng.next_double();
        p_path[static_cast<std::size_t>(k) + 1] = p_step(p, w, p_path[static_cast<std::size_t>(k)], u);
        q_path[static_cast<std::size_t>(k) + 1] = q_step(p, w, q_path[static_cast<std::size_t>(k)], u);
    }
    return {std::move(p_path), std::move(q_path)};
}

ChainDistribution y_marginal_after(const DominanceParams& params, int y1, int steps) {
    params.validate();
    if (steps < 0) throw std::invalid_argument("step count must be nonnegative");
    const int start = std::max(y1, params.eta);
    // Reachable window: at most `steps` up-jumps of size w above the start.
    const int top = start + steps * params.w;
    const int size = top - params.eta + 1;

    std::vector<double> cur(static_cast<std::size_t>(size), 0.0);
    std::vector<double> next(static_cast<std::size_t>(size), 0.0);
    cur[static_cast<std::size_t>(start - params.eta)] = 1.0;
    const double p = params.p;
    for (int k = 0; k < steps; ++k) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int i = 0; i < size; ++i) {
            const double m = cur[static_cast<std::size_t>(i)];
            if (m == 0.0) continue;
            next[static_cast<std::size_t>(std::max(0, i - 1))] += p * m;
            if (p < 1.0) next[static_cast<std::size_t>(std::min(i + params.w, size - 1))] += (1.0 - p) * m;
        }
        cur.swap(next);
    }
    ChainDistribution dist;
    dist.first_state = params.eta;
    dist.mass = std::move(cur);
    dist.truncation_tail = 0.0;
    return dist;
}

DominanceReport verify_error_dominance(const std::vector<double>& error_samples,
                                       const DominanceParams& params, double epsilon, int steps,
                                       const std::vector<double>& quantile_grid,
                                       double initial_error) {
    params.validate();
    if (error_samples.empty()) throw std::invalid_argument("no error samples");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (!(params.p > 0.5)) throw std::invalid_argument("dominance requires p > 1/2");

    const int y1 = std::max(static_cast<int>(std::ceil(initial_error / epsilon)), params.eta);
    const ChainDistribution law = y_marginal_after(params, y1, steps);

    const double n = static_cast<double>(error_samples.size());
    DominanceReport report;
    report.rows.reserve(quantile_grid.size());
    report.all_pass = true;
    report.worst_margin = std::numeric_limits<double>::infinity();
    for (double q : quantile_grid) {
        DominanceReport::Row row;
        row.quantile = q;
        row.lhs = law.upper_tail(q / epsilon);
        long count = 0;
        for (double e : error_samples)
            if (e >= q) ++count;
        row.rhs = static_cast<double>(count) / n;
        const double sigma = std::sqrt(row.rhs * (1.0 - row.rhs) / n);
        row.margin = row.lhs - (row.rhs - 3.0 * sigma);
        row.pass = row.margin >= -1e-12;
        report.worst_margin = std::min(report.worst_margin, row.margin);
        report.all_pass = report.all_pass && row.pass;
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace iro
