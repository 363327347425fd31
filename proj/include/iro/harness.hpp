#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "iro/bounds.hpp"
#include "iro/dominance_chain.hpp"
#include "iro/empirical_operators.hpp"

namespace iro {

enum class OperatorMode { Evi, Ervi, Eqvi, Sgd };

std::string to_string(OperatorMode mode);
OperatorMode operator_mode_from_string(const std::string& name);

/// One experiment: which operator to iterate, sampling and replication
/// sizes, and the thresholds (kappa, epsilon, delta) the reports are checked
/// against. Loadable from JSON; CLI flags mirror the fields.
struct ExperimentConfig {
    std::string mdp_path;
    std::optional<SgdProblem> sgd;
    std::vector<double> sgd_start;  // defaults to the origin
    OperatorMode kind = OperatorMode::Evi;
    int n = 100;
    int iterations = 100;
    int burn_in = 0;
    int replicas = 1000;
    double kappa = 0.5;
    double epsilon = 0.1;
    double delta = 0.1;
    std::uint64_t master_seed = 1;
    std::string output_path;

    void validate() const;
    static ExperimentConfig from_json_text(const std::string& text);
    static ExperimentConfig from_json_file(const std::string& path);
};

/// Config resolved against its model: the MDP (or SGD problem), the exact
/// fixed point, the operator's contraction coefficient and the almost-sure
/// noise bound at the fixed point.
struct Experiment {
    ExperimentConfig config;
    std::optional<FiniteMdp> mdp;
    std::optional<SgdProblem> sgd;
    SolveResult oracle;
    std::vector<double> sgd_fixed_point;
    double alpha = 0.0;
    double wbar = 0.0;
    double initial_error = 0.0;

    static Experiment make(const ExperimentConfig& config);
    static Experiment make(const ExperimentConfig& config, FiniteMdp mdp);

    SolveKind solve_kind() const;
    /// One sampled trajectory of this experiment's operator.
    Trajectory run_replica(std::uint64_t replica, int num_iterations, bool record = false) const;
};

/// Estimate of the asymptotic tail P(error > kappa) from the final iterate
/// of independent replicas, compared against the closed-form certificate.
struct TailBoundReport {
    double empirical_tail = 0.0;
    double ci_halfwidth = 0.0;  // 3-sigma binomial
    double theoretical_bound = 0.0;
    bool stabilized = false;  // tail at K vs the midpoint checkpoint within 2*ci
    bool pass = false;        // empirical_tail - ci <= theoretical_bound
    double mid_tail = 0.0;
    int mid_k = 0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    TailCertificate certificate;
};

struct ReplicaErrors {
    std::vector<double> at_mid;
    std::vector<double> at_final;
    int mid_k = 0;
};

TailBoundReport estimate_tail(const Experiment& exp, ReplicaErrors* errors_out = nullptr);

/// Monte Carlo estimate of the per-step success probability
/// P(alpha_hat <= 1-delta and W <= epsilon) over fresh batches at the fixed
/// point, with the Frechet-Hoeffding combination of the marginals reported
/// for comparison. In the modes whose sampled operator is surely a
/// contraction the alpha event holds by construction.
struct JointSuccessReport {
    double joint = 0.0;
    double ci_halfwidth = 0.0;  // 3-sigma binomial
    double marginal_alpha = 0.0;
    double marginal_w = 0.0;
    double fh_lower = 0.0;
    double p_recommended = 0.0;  // max(0, joint - ci)
    int samples = 0;
};

JointSuccessReport estimate_joint_success(const Experiment& exp, int num_samples);

/// Checks the one-step drift inequality E[||T_hat(v) - v*||] <= c0 at
/// sampled points of the bounded value space, including its boundary.
struct DriftReport {
    struct Row {
        double input_distance = 0.0;
        double statistic = 0.0;
        double std_error = 0.0;
        bool pass = false;
    };
    std::vector<Row> rows;
    double c0 = 0.0;
    bool all_pass = false;
};

DriftReport drift_check(const Experiment& exp, int num_probes, int batches_per_probe);

/// Full dominance run: estimate the success probability, build the
/// dominating-chain parameters, sample replica errors at step k and verify
/// the stochastic-dominance inequality on a quantile grid.
struct DominanceExperimentResult {
    DominanceParams params;
    JointSuccessReport joint;
    DominanceReport report;
    std::vector<double> error_samples;
    double epsilon = 0.0;
    int step = 0;
};

DominanceExperimentResult run_dominance_experiment(const Experiment& exp, int step,
                                                   std::optional<double> p_override = std::nullopt,
                                                   int grid_points = 20);

/// Deviation frequencies behind the probabilistic-contraction checks.
double deviation_frequency_evi(const FiniteMdp& mdp, const ValueFunction& v, int n, double eps,
                               int samples, std::uint64_t master_seed);
double deviation_frequency_ervi(const FiniteMdp& mdp, const ValueFunction& v, int n, double eps,
                                int samples, std::uint64_t master_seed);
double deviation_frequency_eqvi(const FiniteMdp& mdp, const QFunction& q, int n, double eps,
                                int samples, std::uint64_t master_seed);
/// P_hat(alpha_hat > 1 - delta) for the sampled average-cost operator.
double alpha_exceed_frequency(const FiniteMdp& mdp, int n, double delta, int samples,
                              std::uint64_t master_seed);

/// Runs fn(i) for i in [0, count) across hardware threads; results must be
/// written to per-index slots.
void parallel_for(int count, const std::function<void(int)>& fn);

/// Prepends the IRO_OUTPUT_DIR environment variable to relative paths.
std::string resolve_output_path(const std::string& path);

/// Deterministic %.17g rendering used by every CSV writer.
std::string format_double(double x);

void write_trajectories_csv(std::ostream& out, const std::vector<Trajectory>& trajectories,
                            bool with_gain);
void write_replica_errors_csv(std::ostream& out, const ReplicaErrors& errors, int final_k);
void write_stationary_csv(std::ostream& out, const ChainDistribution& dist);
void write_dominance_csv(std::ostream& out, const DominanceReport& report);
std::string tail_report_json(const TailBoundReport& report, const ExperimentConfig& config,
                             const Experiment& exp);
std::string certificate_json(const BoundInputs& inputs, const TailCertificate& cert, double gamma1,
                             double gamma2);
std::string certificate_csv(const BoundInputs& inputs, const TailCertificate& cert, double gamma1,
                            double gamma2);

}  // namespace iro
