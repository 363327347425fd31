#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace iro {

/// Parameters of the dominating integer chains: per-step success probability
/// p, up-jump size w, and the floor eta of the shifted chain.
struct DominanceParams {
    double p = 1.0;
    int w = 1;
    int eta = 0;

    void validate() const;
};

/// Distribution of an integer chain on the contiguous support
/// [first_state, first_state + mass.size()). `truncation_tail` bounds the
/// analytic mass omitted beyond the support (zero for exact computations).
struct ChainDistribution {
    int first_state = 0;
    std::vector<double> mass;
    double truncation_tail = 0.0;

    double mass_at(int state) const {
        const int i = state - first_state;
        if (i < 0 || i >= static_cast<int>(mass.size())) return 0.0;
        return mass[static_cast<std::size_t>(i)];
    }
    double total_mass() const;
    /// P(chain >= q) for real q against the integer support.
    double upper_tail(double q) const;
};

/// One step of the floored chain: stay at eta w.p. p when at the floor, move
/// down one w.p. p otherwise, jump up by w w.p. 1-p. Down moves happen when
/// u < p.
int y_step(const DominanceParams& params, int y, double u);

/// Chain on the nonnegative integers: down one (floored at 0) w.p. p, up by
/// w otherwise.
int p_step(double p, int w, int q, double u);

/// Same, except up-jumps land on the next multiple of w above the current
/// state: w * (ceil(q/w) + 1).
int q_step(double p, int w, int q, double u);

/// Existence thresholds: the down-up chain needs p > w/(w+1), the rounded
/// variant needs p > 2w/(2w+1).
double p_chain_threshold(int w);
double q_chain_threshold(int w);

/// Stationary distribution of the rounded chain in closed form:
///   pi(0) = (2 p^w - 1) / p^w,
///   pi(n w + i) = pi(0) * (1-p) / p^(n w + i) * (1 - p^w)^n,  i in 1..w.
/// The support is truncated once the remaining analytic tail falls below
/// `tail_cap`; requires p > 2w/(2w+1).
ChainDistribution stationary_q_closed_form(double p, int w, double tail_cap = 1e-12);

enum class ChainKind { P, Q, Y };

/// Stationary distribution by power iteration on the chain truncated to
/// `truncation_size` states, with up-jump mass that would leave the window
/// reflected onto the top retained state. Iterates until the L1 stationarity
/// residual drops to `tol`.
ChainDistribution stationary_numeric(ChainKind kind, const DominanceParams& params,
                                     int truncation_size, double tol = 1e-13,
                                     long max_iter = 1000000);

/// Support size for which the closed-form tail beyond the window is below
/// `tail_cap`; usable for all three kinds when p > 2w/(2w+1).
int suggested_truncation(double p, int w, double tail_cap = 1e-12);

/// Runs both integer chains from the same start with one shared uniform draw
/// per step. The rounded chain dominates pathwise: second >= first at every
/// index.
std::pair<std::vector<int>, std::vector<int>> coupled_pq_paths(double p, int w, int num_steps,
                                                               std::uint64_t seed, int start = 0);

/// Exact law of the floored chain after `steps` transitions from a point
/// mass at y1 (clamped to the floor).
ChainDistribution y_marginal_after(const DominanceParams& params, int y1, int steps);

/// One grid point of a dominance check: lhs = P(eps * Y >= q) from the exact
/// chain law, rhs = empirical frequency of errors >= q, margin includes the
/// 3-sigma binomial allowance on the sampled side.
struct DominanceReport {
    struct Row {
        double quantile = 0.0;
        double lhs = 0.0;
        double rhs = 0.0;
        double margin = 0.0;
        bool pass = false;
    };
    std::vector<Row> rows;
    bool all_pass = false;
    double worst_margin = 0.0;
};

/// Verifies that eps * Y_k stochastically dominates the sampled error at
/// step k: P(eps Y_k >= q) >= P_hat(E_k >= q) - 3 sigma at every grid point.
/// The chain law is computed exactly from Y_1 = max(ceil(E_1/eps), eta).
DominanceReport verify_error_dominance(const std::vector<double>& error_samples,
                                       const DominanceParams& params, double epsilon, int steps,
                                       const std::vector<double>& quantile_grid,
                                       double initial_error);

}  // namespace iro
