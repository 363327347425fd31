#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace iro {

/// Real vector over states.
using ValueFunction = std::vector<double>;

/// Deterministic decision rule: one action index per state.
using DecisionRule = std::vector<int>;

/// Real matrix over state-action pairs, stored row-major by state.
struct QFunction {
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> values;

    QFunction() = default;
    QFunction(int states, int actions, double init = 0.0)
        : num_states(states), num_actions(actions),
          values(static_cast<std::size_t>(states) * actions, init) {}

    double& operator()(int s, int a) { return values[static_cast<std::size_t>(s) * num_actions + a]; }
    double operator()(int s, int a) const { return values[static_cast<std::size_t>(s) * num_actions + a]; }

    double min_over_actions(int s) const;
};

/// Finite Markov decision process: per-pair one-stage cost, row-stochastic
/// transition kernel p(j|s,a) and an optional discount factor. Immutable
/// after construction and safe to share across threads.
///
/// Transitions are driven by uniform noise on [0,1]: the next state for
/// (s,a,u) is the inverse CDF of row p(.|s,a) evaluated at u, so the kernel
/// is the single source of truth for the dynamics.
class FiniteMdp {
  public:
    /// cost is indexed (s,a) row-major; kernel is indexed (s,a,j) with the
    /// (s,a) rows in the same order. Rows whose sum deviates from 1 by at
    /// most 1e-12 are renormalized; anything worse is rejected.
    FiniteMdp(int num_states, int num_actions, std::vector<double> cost,
              std::vector<double> kernel, std::optional<double> discount);

    int num_states() const { return num_states_; }
    int num_actions() const { return num_actions_; }
    const std::optional<double>& discount() const { return discount_; }

    double cost(int s, int a) const { return cost_[row_index(s, a)]; }
    double kernel(int s, int a, int j) const { return kernel_[row_index(s, a) * num_states_ + j]; }

    std::span<const double> kernel_row(int s, int a) const {
        return {kernel_.data() + row_index(s, a) * num_states_, static_cast<std::size_t>(num_states_)};
    }
    /// Cumulative sums of a kernel row; last entry is exactly 1.
    std::span<const double> cumulative_row(int s, int a) const {
        return {cumulative_.data() + row_index(s, a) * num_states_, static_cast<std::size_t>(num_states_)};
    }
    std::span<const double> kernel_tensor() const { return kernel_; }

    double cost_sup() const { return cost_sup_; }
    /// Radius ||c||_inf / (1 - gamma) of the discounted value-function space.
    double value_bound() const;

    std::size_t row_index(int s, int a) const { return static_cast<std::size_t>(s) * num_actions_ + a; }

  private:
    int num_states_;
    int num_actions_;
    std::vector<double> cost_;
    std::vector<double> kernel_;
    std::vector<double> cumulative_;
    std::optional<double> discount_;
    double cost_sup_;
};

/// Inverse-CDF lookup on a cumulative row: smallest index j with cum[j] >= u.
inline int state_from_uniform(std::span<const double> cumulative_row, double u) {
    int j = 0;
    const int last = static_cast<int>(cumulative_row.size()) - 1;
    while (j < last && cumulative_row[static_cast<std::size_t>(j)] < u) ++j;
    return j;
}

/// Next state for (s,a) under noise u in [0,1]; the law of the result over
/// uniform u equals kernel row (s,a).
int next_state(const FiniteMdp& mdp, int s, int a, double u);

double sup_norm(std::span<const double> v);
/// sp(v) = max v - min v; zero exactly on constant vectors.
double span_seminorm(std::span<const double> v);

/// Sup-norm distance between equal-length vectors.
double sup_dist(std::span<const double> a, std::span<const double> b);
/// Span-seminorm distance between equal-length vectors.
double span_dist(std::span<const double> a, std::span<const double> b);

/// Span-contraction coefficient of a kernel:
///   alpha = 1 - min over row pairs of sum_j min(p(j|row), p(j|row')).
/// Rows must be stochastic; result lies in [0,1].
double unichain_coefficient(std::span<const double> kernel, int num_rows, int num_states);
double unichain_coefficient(const FiniteMdp& mdp);

/// Per-state argmin of c(s,a) + gamma * sum_j p(j|s,a) v(j); gamma is the
/// discount when `discounted`, otherwise 1. Ties break to the lowest index.
DecisionRule greedy_rule(const FiniteMdp& mdp, const ValueFunction& v, bool discounted);

/// Loads the JSON document {"num_states","num_actions","cost","kernel","discount"}.
/// Validation failures name the first offending row.
FiniteMdp load_mdp(const std::string& path);
FiniteMdp mdp_from_json_text(const std::string& text);
std::string mdp_to_json_text(const FiniteMdp& mdp);

}  // namespace iro
