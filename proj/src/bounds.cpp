#include "iro/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace iro {

void BoundInputs::validate() const {
    if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
    if (!(epsilon > 0.0 && epsilon <= kappa / 2.0))
        throw std::invalid_argument("epsilon must lie in (0, kappa/2]");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (!(delta > 0.0 && delta < 1.0 - alpha))
        throw std::invalid_argument("delta must lie in (0, 1-alpha)");
    if (std::ceil(2.0 / delta) > kappa / epsilon)
        throw std::invalid_argument("ceil(2/delta) must not exceed kappa/epsilon");
    if (!(wbar > 0.0)) throw std::invalid_argument("wbar must be positive");
    if (num_states <= 0 || num_actions <= 0)
        throw std::invalid_argument("state and action counts must be positive");
    if (!(cost_sup >= 0.0)) throw std::invalid_argument("cost_sup must be nonnegative");
    if (n < 0) throw std::invalid_argument("sample size must be nonnegative");
}

double frechet_hoeffding_lower(double m1, double m2) {
    if (!(m1 >= 0.0 && m1 <= 1.0 && m2 >= 0.0 && m2 <= 1.0))
        throw std::invalid_argument("marginals must lie in [0,1]");
    return std::max(0.0, m1 + m2 - 1.0);
}

double hoeffding_w_tail(const BoundInputs& inputs) {
    if (!(inputs.alpha > 0.0 && inputs.alpha < 1.0))
        throw std::invalid_argument("alpha must lie in (0,1)");
    if (!(inputs.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    const double S = static_cast<double>(inputs.num_states);
    const double A = static_cast<double>(inputs.num_actions);
    const double denom = 2.0 * inputs.alpha * inputs.alpha * S * S * inputs.cost_sup * inputs.cost_sup;
    if (denom == 0.0) return 0.0;  // zero-cost model: no noise at all
    const double exponent =
        inputs.epsilon * inputs.epsilon * (1.0 - inputs.alpha) * (1.0 - inputs.alpha) *
        static_cast<double>(inputs.n) / denom;
    return 2.0 * S * A * std::exp(-exponent);
}

double p_n(double gamma1, double gamma2) {
    if (gamma1 < 0.0 || gamma2 < 0.0) throw std::invalid_argument("tail bounds must be nonnegative");
    return std::clamp(1.0 - gamma1 - gamma2, 0.0, 1.0);
}

double tail_bound(double p, int w) {
    if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in (0,1]");
    if (w < 1) throw std::invalid_argument("w must be at least 1");
    const double pw = std::pow(p, w);
    return (1.0 - pw) / pw;
}

std::pair<double, double> thresholds(int w) {
    if (w < 1) throw std::invalid_argument("w must be at least 1");
    return {static_cast<double>(w) / (w + 1), 2.0 * w / (2.0 * w + 1)};
}

long sample_complexity_discounted(double kappa, double confidence, double alpha, double cost_sup,
                                  int num_states, int num_actions) {
    if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
    if (!(confidence > 0.0)) throw std::invalid_argument("confidence must be positive");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (!(cost_sup > 0.0)) throw std::invalid_argument("cost_sup must be positive");
    if (num_states <= 0 || num_actions <= 0)
        throw std::invalid_argument("state and action counts must be positive");

    const long w = static_cast<long>(std::ceil(8.0 * cost_sup / ((1.0 - alpha) * kappa)));
    const double target = 1.0 - std::pow(1.0 / (1.0 + confidence), 1.0 / static_cast<double>(w));
    const double S = static_cast<double>(num_states);
    const double A = static_cast<double>(num_actions);
    const double rate = kappa * kappa * (1.0 - alpha) * (1.0 - alpha) /
                        (32.0 * alpha * alpha * S * S * cost_sup * cost_sup);
    auto satisfied = [&](long n) {
        return 2.0 * S * A * std::exp(-rate * static_cast<double>(n)) <= target;
    };

    // Monotone bisection on the integer boundary; doubling finds a bracket.
    long hi = 1;
    while (!satisfied(hi)) {
        if (hi > (1L << 60)) throw std::runtime_error("sample complexity out of range");
        hi *= 2;
    }
    long lo = hi / 2;  // satisfied(lo) is false (or lo == 0)
    while (lo + 1 < hi) {
        const long mid = lo + (hi - lo) / 2;
        if (satisfied(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double wbar_discounted_v(double alpha, double cost_sup) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (!(cost_sup >= 0.0)) throw std::invalid_argument("cost_sup must be nonnegative");
    return 2.0 * alpha * cost_sup / (1.0 - alpha);
}

double wbar_q(double gamma, double q_star_sup) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
    if (!(q_star_sup >= 0.0)) throw std::invalid_argument("q_star_sup must be nonnegative");
    return 2.0 * gamma * q_star_sup;
}

double drift_constant_discounted(const FiniteMdp& mdp) {
    if (!mdp.discount()) throw std::invalid_argument("drift constant requires a discount factor");
    return 2.0 * mdp.cost_sup() / (1.0 - *mdp.discount());
}

TailCertificate make_certificate(const BoundInputs& inputs, double gamma1) {
    inputs.validate();
    TailCertificate cert;
    cert.w = static_cast<int>(std::ceil(inputs.wbar / inputs.epsilon));
    cert.p = p_n(gamma1, hoeffding_w_tail(inputs));
    cert.valid = cert.p > 2.0 * cert.w / (2.0 * cert.w + 1.0);
    cert.bound = cert.p > 0.0 ? tail_bound(cert.p, cert.w) : std::numeric_limits<double>::infinity();
    return cert;
}

}  // namespace iro
