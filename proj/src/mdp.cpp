#include "iro/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace iro {

namespace {

constexpr double kRowSumTolerance = 1e-12;

[[noreturn]] void reject_row(int s, int a, const std::string& reason) {
    std::ostringstream msg;
    msg << "kernel row (s=" << s << ", a=" << a << "): " << reason;
    throw std::invalid_argument(msg.str());
}

}  // namespace

double QFunction::min_over_actions(int s) const {
    double best = std::numeric_limits<double>::infinity();
    for (int a = 0; a < num_actions; ++a) best = std::min(best, (*this)(s, a));
    return best;
}

FiniteMdp::FiniteMdp(int num_states, int num_actions, std::vector<double> cost,
                     std::vector<double> kernel, std::optional<double> discount)
    : num_states_(num_states), num_actions_(num_actions), cost_(std::move(cost)),
      kernel_(std::move(kernel)), discount_(discount) {
    if (num_states_ <= 0 || num_actions_ <= 0)
        throw std::invalid_argument("num_states and num_actions must be positive");
    const std::size_t pairs = static_cast<std::size_t>(num_states_) * num_actions_;
    if (cost_.size() != pairs) throw std::invalid_argument("cost has wrong shape");
    if (kernel_.size() != pairs * num_states_) throw std::invalid_argument("kernel has wrong shape");
    if (discount_ && !(*discount_ > 0.0 && *discount_ < 1.0))
        throw std::invalid_argument("discount must lie in (0,1)");

    cost_sup_ = 0.0;
    for (double c : cost_) {
        if (!std::isfinite(c)) throw std::invalid_argument("cost entries must be finite");
        cost_sup_ = std::max(cost_sup_, std::abs(c));
    }

    cumulative_.resize(kernel_.size());
    for (int s = 0; s < num_states_; ++s) {
        for (int a = 0; a < num_actions_; ++a) {
            double* row = kernel_.data() + row_index(s, a) * num_states_;
            double sum = 0.0;
            for (int j = 0; j < num_states_; ++j) {
                const double p = row[j];
                if (!(p >= 0.0 && p <= 1.0)) reject_row(s, a, "entry outside [0,1]");
                sum += p;
            }
            if (std::abs(sum - 1.0) > kRowSumTolerance) {
                std::ostringstream reason;
                reason << "row sum " << sum << " deviates from 1 beyond tolerance";
                reject_row(s, a, reason.str());
            }
            // Renormalize within tolerance so cumulative sums end at exactly 1.
            double* cum = cumulative_.data() + row_index(s, a) * num_states_;
            double acc = 0.0;
            for (int j = 0; j < num_states_; ++j) {
                row[j] /= sum;
                acc += row[j];
                cum[j] = acc;
            }
            cum[num_states_ - 1] = 1.0;
        }
    }
}

double FiniteMdp::value_bound() const {
    if (!discount_) throw std::invalid_argument("value_bound requires a discount factor");
    return cost_sup_ / (1.0 - *discount_);
}

int next_state(const FiniteMdp& mdp, int s, int a, double u) {
    if (s < 0 || s >= mdp.num_states()) throw std::out_of_range("state index out of range");
    if (a < 0 || a >= mdp.num_actions()) throw std::out_of_range("action index out of range");
    if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("noise u must lie in [0,1]");
    return state_from_uniform(mdp.cumulative_row(s, a), u);
}

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double span_seminorm(std::span<const double> v) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return v.empty() ? 0.0 : hi - lo;
}

double sup_dist(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double span_dist(std::span<const double> a, std::span<const double> b) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return a.empty() ? 0.0 : hi - lo;
}

double unichain_coefficient(std::span<const double> kernel, int num_rows, int num_states) {
    if (num_rows <= 0 || num_states <= 0) throw std::invalid_argument("empty kernel");
    if (kernel.size() != static_cast<std::size_t>(num_rows) * num_states)
        throw std::invalid_argument("kernel has wrong shape");
    for (int r = 0; r < num_rows; ++r) {
        double sum = 0.0;
        for (int j = 0; j < num_states; ++j) sum += kernel[static_cast<std::size_t>(r) * num_states + j];
        if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("non-stochastic kernel row");
    }
    double min_overlap = std::numeric_limits<double>::infinity();
    for (int r1 = 0; r1 < num_rows; ++r1) {
        const double* row1 = kernel.data() + static_cast<std::size_t>(r1) * num_states;
        for (int r2 = r1; r2 < num_rows; ++r2) {
            const double* row2 = kernel.data() + static_cast<std::size_t>(r2) * num_states;
            double overlap = 0.0;
            for (int j = 0; j < num_states; ++j) overlap += std::min(row1[j], row2[j]);
            min_overlap = std::min(min_overlap, overlap);
        }
    }
    return std::clamp(1.0 - min_overlap, 0.0, 1.0);
}

double unichain_coefficient(const FiniteMdp& mdp) {
    return unichain_coefficient(mdp.kernel_tensor(), mdp.num_states() * mdp.num_actions(),
                                mdp.num_states());
}

DecisionRule greedy_rule(const FiniteMdp& mdp, const ValueFunction& v, bool discounted) {
    if (static_cast<int>(v.size()) != mdp.num_states())
        throw std::invalid_argument("value function has wrong length");
    const double gamma = discounted ? mdp.discount().value() : 1.0;
    DecisionRule rule(static_cast<std::size_t>(mdp.num_states()), 0);
    for (int s = 0; s < mdp.num_states(); ++s) {
        double best = std::numeric_limits<double>::infinity();
        for (int a = 0; a < mdp.num_actions(); ++a) {
            auto row = mdp.kernel_row(s, a);
            double expected = 0.0;
            for (int j = 0; j < mdp.num_states(); ++j) expected += row[static_cast<std::size_t>(j)] * v[static_cast<std::size_t>(j)];
            const double q = mdp.cost(s, a) + gamma * expected;
            if (q < best) {
                best = q;
                rule[static_cast<std::size_t>(s)] = a;
            }
        }
    }
    return rule;
}

FiniteMdp mdp_from_json_text(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    const int S = doc.at("num_states").get<int>();
    const int A = doc.at("num_actions").get<int>();
    if (S <= 0 || A <= 0) throw std::invalid_argument("num_states and num_actions must be positive");

    const auto& cost_doc = doc.at("cost");
    const auto& kernel_doc = doc.at("kernel");
    if (static_cast<int>(cost_doc.size()) != S) throw std::invalid_argument("cost has wrong number of state rows");
    if (static_cast<int>(kernel_doc.size()) != S) throw std::invalid_argument("kernel has wrong number of state rows");

    std::vector<double> cost;
    cost.reserve(static_cast<std::size_t>(S) * A);
    std::vector<double> kernel;
    kernel.reserve(static_cast<std::size_t>(S) * A * S);
    for (int s = 0; s < S; ++s) {
        if (static_cast<int>(cost_doc[s].size()) != A) throw std::invalid_argument("cost row has wrong length");
        if (static_cast<int>(kernel_doc[s].size()) != A) throw std::invalid_argument("kernel row has wrong length");
        for (int a = 0; a < A; ++a) {
            cost.push_back(cost_doc[s][a].get<double>());
            const auto& row = kernel_doc[s][a];
            if (static_cast<int>(row.size()) != S) reject_row(s, a, "wrong length");
            for (int j = 0; j < S; ++j) kernel.push_back(row[j].get<double>());
        }
    }
    std::optional<double> discount;
    if (doc.contains("discount") && !doc["discount"].is_null()) discount = doc["discount"].get<double>();
    return FiniteMdp(S, A, std::move(cost), std::move(kernel), discount);
}

FiniteMdp load_mdp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open MDP file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return mdp_from_json_text(buf.str());
}

std::string mdp_to_json_text(const FiniteMdp& mdp) {
    nlohmann::ordered_json doc;
    doc["num_states"] = mdp.num_states();
    doc["num_actions"] = mdp.num_actions();
    auto cost = nlohmann::ordered_json::array();
    auto kernel = nlohmann::ordered_json::array();
    for (int s = 0; s < mdp.num_states(); ++s) {
        auto cost_row = nlohmann::ordered_json::array();
        auto kernel_row = nlohmann::ordered_json::array();
        for (int a = 0; a < mdp.num_actions(); ++a) {
            cost_row.push_back(mdp.cost(s, a));
            auto row = nlohmann::ordered_json::array();
            for (int j = 0; j < mdp.num_states(); ++j) row.push_back(mdp.kernel(s, a, j));
            kernel_row.push_back(std::move(row));
        }
        cost.push_back(std::move(cost_row));
        kernel.push_back(std::move(kernel_row));
    }
    doc["cost"] = std::move(cost);
    doc["kernel"] = std::move(kernel);
    if (mdp.discount())
        doc["discount"] = *mdp.discount();
    else
        doc["discount"] = nullptr;
    return doc.dump(2);
}

}  // namespace iro
