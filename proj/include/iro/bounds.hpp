#pragma once

#include <utility>

#include "iro/mdp.hpp"

namespace iro {

/// Everything the closed-form certificates need. `alpha` is the contraction
/// coefficient of the exact operator (the discount factor in discounted
/// mode, the unichain coefficient in average-cost mode) and `wbar` the
/// almost-sure bound on the one-step noise at the fixed point.
struct BoundInputs {
    double kappa = 0.0;
    double epsilon = 0.0;
    double delta = 0.0;
    double alpha = 0.0;
    double wbar = 0.0;
    double cost_sup = 0.0;
    int num_states = 0;
    int num_actions = 0;
    long n = 0;

    void validate() const;
};

/// Tail certificate: with probability floor p per step and up-jump size
/// w = ceil(wbar/epsilon), the asymptotic error tail is bounded by
/// (1 - p^w) / p^w. Only `valid` when p clears the dominating chain's
/// existence threshold 2w/(2w+1), which also forces p^w > 1/sqrt(e).
struct TailCertificate {
    double p = 0.0;
    int w = 1;
    double bound = 0.0;
    bool valid = false;
};

/// Lower bound on a joint probability from its marginals:
/// max(0, m1 + m2 - 1).
double frechet_hoeffding_lower(double m1, double m2);

/// Hoeffding/union tail on the fixed-point noise in discounted mode:
///   gamma2(n, eps) = 2|S||A| exp( -eps^2 (1-alpha)^2 n / (2 alpha^2 |S|^2 ||c||^2) ).
/// May exceed 1 for small n; callers clip.
double hoeffding_w_tail(const BoundInputs& inputs);

/// p = 1 - gamma1 - gamma2, clipped to [0,1].
double p_n(double gamma1, double gamma2);

/// (1 - p^w) / p^w.
double tail_bound(double p, int w);

/// (w/(w+1), 2w/(2w+1)): invariant-distribution thresholds of the plain and
/// rounded dominating chains.
std::pair<double, double> thresholds(int w);

/// Smallest n such that, with eps = kappa/4 and w = ceil(8 ||c|| / ((1-alpha) kappa)),
///   2|S||A| exp( -kappa^2 (1-alpha)^2 n / (32 alpha^2 |S|^2 ||c||^2) )
///     <= 1 - (1/(1+confidence))^(1/w).
/// At any n at or above the result the asymptotic error tail at radius kappa
/// is at most `confidence`.
long sample_complexity_discounted(double kappa, double confidence, double alpha, double cost_sup,
                                  int num_states, int num_actions);

/// Almost-sure noise bound 2 alpha ||c|| / (1 - alpha) for the discounted
/// value operator.
double wbar_discounted_v(double alpha, double cost_sup);

/// Almost-sure noise bound 2 gamma ||Q*|| for the Q operator.
double wbar_q(double gamma, double q_star_sup);

/// Drift allowance c0 = 2 ||c|| / (1 - gamma): the diameter of the bounded
/// value space, and an upper bound on E[ ||T_hat(v) - v*|| ] over it.
double drift_constant_discounted(const FiniteMdp& mdp);

/// Assembles the certificate from the inputs: p = 1 - gamma1 - gamma2 with
/// gamma1 as given (zero in discounted mode, where the sampled contraction
/// coefficient never exceeds alpha).
TailCertificate make_certificate(const BoundInputs& inputs, double gamma1 = 0.0);

}  // namespace iro
