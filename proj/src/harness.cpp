#include "iro/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace iro {

namespace {

// Purpose salts keep the trajectory, success-probability and drift streams
// disjoint even under one master seed.
constexpr std::uint64_t kJointSalt = 0x4a4f494e54ull;
constexpr std::uint64_t kDriftSalt = 0x4452494654ull;

double binomial_ci(double frequency, double samples) {
    return 3.0 * std::sqrt(frequency * (1.0 - frequency) / samples);
}

}  // namespace

std::string to_string(OperatorMode mode) {
    switch (mode) {
    case OperatorMode::Evi: return "evi";
    case OperatorMode::Ervi: return "ervi";
    case OperatorMode::Eqvi: return "eqvi";
    case OperatorMode::Sgd: return "sgd";
    }
    return "evi";
}

OperatorMode operator_mode_from_string(const std::string& name) {
    if (name == "evi") return OperatorMode::Evi;
    if (name == "ervi") return OperatorMode::Ervi;
    if (name == "eqvi") return OperatorMode::Eqvi;
    if (name == "sgd") return OperatorMode::Sgd;
    throw std::invalid_argument("unknown operator kind: " + name);
}

void ExperimentConfig::validate() const {
    if (kind == OperatorMode::Sgd) {
        if (!sgd) throw std::invalid_argument("sgd experiments need an sgd problem spec");
        sgd->validate();
    } else if (mdp_path.empty()) {
        throw std::invalid_argument("mdp experiments need an mdp path");
    }
    if (n < 1) throw std::invalid_argument("sample size n must be at least 1");
    if (burn_in < 0 || iterations <= burn_in)
        throw std::invalid_argument("need iterations > burn_in >= 0");
    if (replicas < 1) throw std::invalid_argument("need at least one replica");
    if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
    if (!(epsilon > 0.0 && epsilon <= kappa / 2.0))
        throw std::invalid_argument("epsilon must lie in (0, kappa/2]");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
    nlohmann::json doc = nlohmann::json::parse(text);
    ExperimentConfig cfg;
    if (doc.contains("mdp")) cfg.mdp_path = doc["mdp"].get<std::string>();
    if (doc.contains("kind")) cfg.kind = operator_mode_from_string(doc["kind"].get<std::string>());
    if (doc.contains("n")) cfg.n = doc["n"].get<int>();
    if (doc.contains("iterations")) cfg.iterations = doc["iterations"].get<int>();
    if (doc.contains("burn_in")) cfg.burn_in = doc["burn_in"].get<int>();
    if (doc.contains("replicas")) cfg.replicas = doc["replicas"].get<int>();
    if (doc.contains("kappa")) cfg.kappa = doc["kappa"].get<double>();
    if (doc.contains("epsilon")) cfg.epsilon = doc["epsilon"].get<double>();
    if (doc.contains("delta")) cfg.delta = doc["delta"].get<double>();
    if (doc.contains("master_seed")) cfg.master_seed = doc["master_seed"].get<std::uint64_t>();
    if (doc.contains("output")) cfg.output_path = doc["output"].get<std::string>();
    if (doc.contains("sgd")) {
        const auto& s = doc["sgd"];
        SgdProblem prob;
        prob.dimension = s.at("dimension").get<int>();
        prob.target_mean = s.at("target_mean").get<std::vector<double>>();
        prob.step_size = s.at("step_size").get<double>();
        cfg.sgd = std::move(prob);
        if (s.contains("start")) cfg.sgd_start = s["start"].get<std::vector<double>>();
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json_text(buf.str());
}

SolveKind Experiment::solve_kind() const {
    switch (config.kind) {
    case OperatorMode::Evi: return SolveKind::DiscountedV;
    case OperatorMode::Ervi: return SolveKind::AverageV;
    case OperatorMode::Eqvi: return SolveKind::DiscountedQ;
    case OperatorMode::Sgd: break;
    }
    throw std::logic_error("sgd experiments have no MDP solve kind");
}

namespace {

Experiment make_experiment(const ExperimentConfig& config, std::optional<FiniteMdp> mdp) {
    config.validate();
    Experiment exp;
    exp.config = config;

    if (config.kind == OperatorMode::Sgd) {
        exp.sgd = config.sgd;
        exp.sgd_fixed_point = exp.sgd->target_mean;
        exp.alpha = std::abs(1.0 - exp.sgd->step_size);
        exp.wbar = 0.5 * exp.sgd->step_size * std::sqrt(static_cast<double>(exp.sgd->dimension));
        std::vector<double> start = config.sgd_start;
        if (start.empty()) start.assign(static_cast<std::size_t>(exp.sgd->dimension), 0.0);
        if (static_cast<int>(start.size()) != exp.sgd->dimension)
            throw std::invalid_argument("sgd start point has wrong dimension");
        exp.config.sgd_start = start;
        double acc = 0.0;
        for (int i = 0; i < exp.sgd->dimension; ++i) {
            const double d = start[static_cast<std::size_t>(i)] - exp.sgd_fixed_point[static_cast<std::size_t>(i)];
            acc += d * d;
        }
        exp.initial_error = std::sqrt(acc);
        if (!(config.delta < 1.0 - exp.alpha))
            throw std::invalid_argument("delta must lie in (0, 1-alpha) for this model");
        return exp;
    }

    exp.mdp = mdp ? std::move(mdp) : load_mdp(config.mdp_path);
    const FiniteMdp& m = *exp.mdp;
    switch (config.kind) {
    case OperatorMode::Evi: {
        exp.oracle = solve_fixed_point(m, SolveKind::DiscountedV, 1e-12);
        exp.alpha = m.discount().value();
        exp.wbar = wbar_discounted_v(exp.alpha, m.cost_sup());
        exp.initial_error = sup_norm(exp.oracle.value);
        break;
    }
    case OperatorMode::Ervi: {
        exp.oracle = solve_fixed_point(m, SolveKind::AverageV, 1e-12);
        exp.alpha = unichain_coefficient(m);
        // Sample means of v* lie inside its range, so the span deviation of
        // one sampled application at v* never exceeds twice that range.
        exp.wbar = 2.0 * span_seminorm(exp.oracle.value);
        exp.initial_error = span_seminorm(exp.oracle.value);
        break;
    }
    case OperatorMode::Eqvi: {
        exp.oracle = solve_fixed_point(m, SolveKind::DiscountedQ, 1e-12);
        exp.alpha = m.discount().value();
        exp.wbar = wbar_q(exp.alpha, sup_norm(exp.oracle.qvalue.values));
        exp.initial_error = sup_norm(exp.oracle.qvalue.values);
        break;
    }
    case OperatorMode::Sgd: break;
    }
    if (!(config.delta < 1.0 - exp.alpha))
        throw std::invalid_argument("delta must lie in (0, 1-alpha) for this model");
    return exp;
}

}  // namespace

Experiment Experiment::make(const ExperimentConfig& config) { return make_experiment(config, std::nullopt); }

Experiment Experiment::make(const ExperimentConfig& config, FiniteMdp mdp) {
    return make_experiment(config, std::move(mdp));
}

Trajectory Experiment::run_replica(std::uint64_t replica, int num_iterations, bool record) const {
    if (config.kind == OperatorMode::Sgd)
        return run_iterated_sgd(*sgd, config.sgd_start, config.n, num_iterations,
                                config.master_seed, replica, record);
    return run_iterated(*mdp, solve_kind(), oracle, config.n, num_iterations, config.master_seed,
                        replica, record);
}

void parallel_for(int count, const std::function<void(int)>& fn) {
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int workers = static_cast<int>(std::min<unsigned>(hw, static_cast<unsigned>(std::max(1, count))));
    if (workers <= 1 || count < 4) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    std::exception_ptr failure;
    std::mutex failure_lock;
    for (int t = 0; t < workers; ++t) {
        threads.emplace_back([&, t] {
            try {
                for (int i = t; i < count; i += workers) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> guard(failure_lock);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& th : threads) th.join();
    if (failure) std::rethrow_exception(failure);
}

namespace {

/// One-step noise at the fixed point for one batch, in the mode's metric.
double noise_at_fixed_point(const Experiment& exp, const SampleBatch& batch) {
    switch (exp.config.kind) {
    case OperatorMode::Evi: {
        ValueFunction applied = empirical_bellman(*exp.mdp, exp.oracle.value, batch);
        return sup_dist(applied, exp.oracle.value);
    }
    case OperatorMode::Ervi: {
        auto [applied, gain] = empirical_relative_bellman(*exp.mdp, exp.oracle.value, batch);
        (void)gain;
        return span_dist(applied, exp.oracle.value);
    }
    case OperatorMode::Eqvi: {
        QFunction applied = empirical_q(*exp.mdp, exp.oracle.qvalue, batch);
        return sup_dist(applied.values, exp.oracle.qvalue.values);
    }
    case OperatorMode::Sgd: {
        std::vector<double> applied = sgd_step(*exp.sgd, exp.sgd_fixed_point, batch);
        double acc = 0.0;
        for (std::size_t i = 0; i < applied.size(); ++i) {
            const double d = applied[i] - exp.sgd_fixed_point[i];
            acc += d * d;
        }
        return std::sqrt(acc);
    }
    }
    return 0.0;
}

BoundInputs bound_inputs_for(const Experiment& exp) {
    BoundInputs inputs;
    inputs.kappa = exp.config.kappa;
    inputs.epsilon = exp.config.epsilon;
    inputs.delta = exp.config.delta;
    inputs.alpha = exp.alpha;
    inputs.wbar = exp.wbar;
    inputs.n = exp.config.n;
    if (exp.mdp) {
        inputs.cost_sup = exp.mdp->cost_sup();
        inputs.num_states = exp.mdp->num_states();
        inputs.num_actions = exp.mdp->num_actions();
    } else {
        inputs.cost_sup = 1.0;
        inputs.num_states = 1;
        inputs.num_actions = 1;
    }
    return inputs;
}

/// gamma2 for the SGD family: Hoeffding on the batch mean of uniforms.
double sgd_gamma2(const Experiment& exp) {
    const double beta = exp.sgd->step_size;
    const double d = static_cast<double>(exp.sgd->dimension);
    const double t = exp.config.epsilon / (beta * std::sqrt(d));
    return 2.0 * std::exp(-2.0 * static_cast<double>(exp.config.n) * t * t);
}

}  // namespace

TailBoundReport estimate_tail(const Experiment& exp, ReplicaErrors* errors_out) {
    const ExperimentConfig& cfg = exp.config;
    const int K = cfg.iterations;
    const int mid_k = std::max(K / 2, cfg.burn_in);
    const int R = cfg.replicas;

    ReplicaErrors errors;
    errors.mid_k = mid_k;
    errors.at_mid.assign(static_cast<std::size_t>(R), 0.0);
    errors.at_final.assign(static_cast<std::size_t>(R), 0.0);
    parallel_for(R, [&](int r) {
        Trajectory traj = exp.run_replica(static_cast<std::uint64_t>(r), K);
        errors.at_mid[static_cast<std::size_t>(r)] = traj.errors[static_cast<std::size_t>(mid_k)];
        errors.at_final[static_cast<std::size_t>(r)] = traj.errors[static_cast<std::size_t>(K)];
    });

    TailBoundReport report;
    long over_final = 0;
    long over_mid = 0;
    for (int r = 0; r < R; ++r) {
        if (errors.at_final[static_cast<std::size_t>(r)] > cfg.kappa) ++over_final;
        if (errors.at_mid[static_cast<std::size_t>(r)] > cfg.kappa) ++over_mid;
    }
    report.empirical_tail = static_cast<double>(over_final) / R;
    report.mid_tail = static_cast<double>(over_mid) / R;
    report.mid_k = mid_k;
    report.ci_halfwidth = binomial_ci(report.empirical_tail, R);
    report.stabilized = std::abs(report.empirical_tail - report.mid_tail) < 2.0 * report.ci_halfwidth;

    BoundInputs inputs = bound_inputs_for(exp);
    switch (cfg.kind) {
    case OperatorMode::Evi:
    case OperatorMode::Eqvi: {
        report.gamma1 = 0.0;  // the sampled operator contracts at gamma surely
        report.gamma2 = hoeffding_w_tail(inputs);
        report.certificate = make_certificate(inputs, 0.0);
        break;
    }
    case OperatorMode::Sgd: {
        report.gamma1 = 0.0;
        report.gamma2 = sgd_gamma2(exp);
        report.certificate.w = static_cast<int>(std::ceil(exp.wbar / cfg.epsilon));
        report.certificate.p = p_n(0.0, report.gamma2);
        report.certificate.valid =
            report.certificate.p > q_chain_threshold(report.certificate.w);
        report.certificate.bound = report.certificate.p > 0.0
                                       ? tail_bound(report.certificate.p, report.certificate.w)
                                       : std::numeric_limits<double>::infinity();
        break;
    }
    case OperatorMode::Ervi: {
        // No uniform closed-form tails in average-cost mode; both marginals
        // are estimated and padded by their own confidence allowance.
        JointSuccessReport joint = estimate_joint_success(exp, cfg.replicas);
        report.gamma1 = std::min(1.0, 1.0 - joint.marginal_alpha +
                                          binomial_ci(joint.marginal_alpha, joint.samples));
        report.gamma2 = std::min(1.0, 1.0 - joint.marginal_w +
                                          binomial_ci(joint.marginal_w, joint.samples));
        report.certificate.w = static_cast<int>(std::ceil(exp.wbar / cfg.epsilon));
        report.certificate.p = p_n(report.gamma1, report.gamma2);
        report.certificate.valid =
            report.certificate.p > q_chain_threshold(report.certificate.w);
        report.certificate.bound = report.certificate.p > 0.0
                                       ? tail_bound(report.certificate.p, report.certificate.w)
                                       : std::numeric_limits<double>::infinity();
        break;
    }
    }
    report.theoretical_bound = report.certificate.bound;
    report.pass = report.empirical_tail - report.ci_halfwidth <= report.theoretical_bound;

    if (errors_out) *errors_out = std::move(errors);
    return report;
}

JointSuccessReport estimate_joint_success(const Experiment& exp, int num_samples) {
    if (num_samples < 1) throw std::invalid_argument("need at least one sample");
    const std::uint64_t master = detail::mix64(exp.config.master_seed ^ kJointSalt);
    const bool average = exp.config.kind == OperatorMode::Ervi;
    const double one_minus_delta = 1.0 - exp.config.delta;

    std::vector<unsigned char> w_ok(static_cast<std::size_t>(num_samples), 0);
    std::vector<unsigned char> alpha_ok(static_cast<std::size_t>(num_samples), 0);
    parallel_for(num_samples, [&](int i) {
        SampleBatch batch = draw_batch({master, static_cast<std::uint64_t>(i), 0}, exp.config.n);
        const double w = noise_at_fixed_point(exp, batch);
        w_ok[static_cast<std::size_t>(i)] = w <= exp.config.epsilon ? 1 : 0;
        if (average) {
            const std::vector<double> p_hat = empirical_kernel(*exp.mdp, batch);
            const double a_hat = empirical_span_coefficient(
                p_hat, exp.mdp->num_states() * exp.mdp->num_actions(), exp.mdp->num_states());
            alpha_ok[static_cast<std::size_t>(i)] = a_hat <= one_minus_delta ? 1 : 0;
        } else {
            // Fixed-batch contraction at coefficient alpha < 1 - delta holds surely.
            alpha_ok[static_cast<std::size_t>(i)] = 1;
        }
    });

    long joint = 0;
    long alpha_count = 0;
    long w_count = 0;
    for (int i = 0; i < num_samples; ++i) {
        alpha_count += alpha_ok[static_cast<std::size_t>(i)];
        w_count += w_ok[static_cast<std::size_t>(i)];
        joint += alpha_ok[static_cast<std::size_t>(i)] & w_ok[static_cast<std::size_t>(i)];
    }

    JointSuccessReport report;
    report.samples = num_samples;
    report.joint = static_cast<double>(joint) / num_samples;
    report.marginal_alpha = static_cast<double>(alpha_count) / num_samples;
    report.marginal_w = static_cast<double>(w_count) / num_samples;
    report.fh_lower = frechet_hoeffding_lower(report.marginal_alpha, report.marginal_w);
    report.ci_halfwidth = binomial_ci(report.joint, num_samples);
    report.p_recommended = std::max(0.0, report.joint - report.ci_halfwidth);
    return report;
}

DriftReport drift_check(const Experiment& exp, int num_probes, int batches_per_probe) {
    if (exp.config.kind != OperatorMode::Evi)
        throw std::invalid_argument("drift check applies to the discounted value operator");
    if (num_probes < 1 || batches_per_probe < 2) throw std::invalid_argument("bad probe counts");
    const FiniteMdp& mdp = *exp.mdp;
    const double bound = mdp.value_bound();
    const std::uint64_t master = detail::mix64(exp.config.master_seed ^ kDriftSalt);

    DriftReport report;
    report.c0 = drift_constant_discounted(mdp);
    report.rows.resize(static_cast<std::size_t>(num_probes));
    report.all_pass = true;

    for (int probe = 0; probe < num_probes; ++probe) {
        CounterRng rng(detail::mix64(master + static_cast<std::uint64_t>(probe)));
        ValueFunction v(static_cast<std::size_t>(mdp.num_states()));
        // Alternate interior points with corners of the value space.
        if (probe % 2 == 0) {
            for (double& x : v) x = bound * (2.0 * rng.next_double() - 1.0);
        } else {
            for (double& x : v) x = rng.next_double() < 0.5 ? -bound : bound;
        }
        double sum = 0.0;
        double sum_sq = 0.0;
        for (int b = 0; b < batches_per_probe; ++b) {
            SampleBatch batch = draw_batch(
                {master, static_cast<std::uint64_t>(probe), static_cast<std::uint64_t>(b) + 1},
                exp.config.n);
            ValueFunction applied = empirical_bellman(mdp, v, batch);
            const double dist = sup_dist(applied, exp.oracle.value);
            sum += dist;
            sum_sq += dist * dist;
        }
        const double mean = sum / batches_per_probe;
        const double var = std::max(0.0, sum_sq / batches_per_probe - mean * mean);
        DriftReport::Row& row = report.rows[static_cast<std::size_t>(probe)];
        row.input_distance = sup_dist(v, exp.oracle.value);
        row.statistic = mean;
        row.std_error = std::sqrt(var / batches_per_probe);
        row.pass = row.statistic <= report.c0 + 3.0 * row.std_error;
        report.all_pass = report.all_pass && row.pass;
    }
    return report;
}

DominanceExperimentResult run_dominance_experiment(const Experiment& exp, int step,
                                                   std::optional<double> p_override,
                                                   int grid_points) {
    if (step < 1) throw std::invalid_argument("dominance step must be at least 1");
    if (grid_points < 2) throw std::invalid_argument("need at least two grid points");

    DominanceExperimentResult result;
    result.step = step;
    result.epsilon = exp.config.epsilon;
    result.joint = estimate_joint_success(exp, exp.config.replicas);

    double p = p_override ? *p_override : result.joint.p_recommended;
    p = std::min(p, 1.0);
    if (!(p > 0.5))
        throw std::runtime_error("estimated success probability does not exceed 1/2; "
                                 "dominance hypothesis fails at these (n, epsilon, delta)");
    result.params.p = p;
    result.params.w = static_cast<int>(std::ceil(exp.wbar / exp.config.epsilon));
    result.params.eta = static_cast<int>(std::ceil(2.0 / exp.config.delta));

    result.error_samples.assign(static_cast<std::size_t>(exp.config.replicas), 0.0);
    parallel_for(exp.config.replicas, [&](int r) {
        Trajectory traj = exp.run_replica(static_cast<std::uint64_t>(r), step);
        result.error_samples[static_cast<std::size_t>(r)] = traj.errors[static_cast<std::size_t>(step)];
    });

    const double sample_max =
        *std::max_element(result.error_samples.begin(), result.error_samples.end());
    const double q_max =
        1.1 * std::max({exp.config.epsilon * (result.params.eta + result.params.w), sample_max,
                        exp.config.kappa});
    std::vector<double> grid(static_cast<std::size_t>(grid_points));
    for (int i = 0; i < grid_points; ++i)
        grid[static_cast<std::size_t>(i)] = q_max * static_cast<double>(i) / (grid_points - 1);

    result.report = verify_error_dominance(result.error_samples, result.params,
                                           exp.config.epsilon, step, grid, exp.initial_error);
    return result;
}

double deviation_frequency_evi(const FiniteMdp& mdp, const ValueFunction& v, int n, double eps,
                               int samples, std::uint64_t master_seed) {
    const ValueFunction exact = bellman_discounted(mdp, v);
    std::vector<unsigned char> over(static_cast<std::size_t>(samples), 0);
    parallel_for(samples, [&](int i) {
        SampleBatch batch = draw_batch({master_seed, static_cast<std::uint64_t>(i), 0}, n);
        ValueFunction applied = empirical_bellman(mdp, v, batch);
        over[static_cast<std::size_t>(i)] = sup_dist(applied, exact) > eps ? 1 : 0;
    });
    long count = 0;
    for (unsigned char c : over) count += c;
    return static_cast<double>(count) / samples;
}

double deviation_frequency_ervi(const FiniteMdp& mdp, const ValueFunction& v, int n, double eps,
                                int samples, std::uint64_t master_seed) {
    const ValueFunction exact = relative_bellman(mdp, v).first;
    std::vector<unsigned char> over(static_cast<std::size_t>(samples), 0);
    parallel_for(samples, [&](int i) {
        SampleBatch batch = draw_batch({master_seed, static_cast<std::uint64_t>(i), 0}, n);
        ValueFunction applied = empirical_relative_bellman(mdp, v, batch).first;
        over[static_cast<std::size_t>(i)] = span_dist(applied, exact) > eps ? 1 : 0;
    });
    long count = 0;
    for (unsigned char c : over) count += c;
    return static_cast<double>(count) / samples;
}

double deviation_frequency_eqvi(const FiniteMdp& mdp, const QFunction& q, int n, double eps,
                                int samples, std::uint64_t master_seed) {
    const QFunction exact = q_bellman(mdp, q);
    std::vector<unsigned char> over(static_cast<std::size_t>(samples), 0);
    parallel_for(samples, [&](int i) {
        SampleBatch batch = draw_batch({master_seed, static_cast<std::uint64_t>(i), 0}, n);
        QFunction applied = empirical_q(mdp, q, batch);
        over[static_cast<std::size_t>(i)] = sup_dist(applied.values, exact.values) > eps ? 1 : 0;
    });
    long count = 0;
    for (unsigned char c : over) count += c;
    return static_cast<double>(count) / samples;
}

double alpha_exceed_frequency(const FiniteMdp& mdp, int n, double delta, int samples,
                              std::uint64_t master_seed) {
    const double cutoff = 1.0 - delta;
    const int rows = mdp.num_states() * mdp.num_actions();
    std::vector<unsigned char> over(static_cast<std::size_t>(samples), 0);
    parallel_for(samples, [&](int i) {
        SampleBatch batch = draw_batch({master_seed, static_cast<std::uint64_t>(i), 0}, n);
        const std::vector<double> p_hat = empirical_kernel(mdp, batch);
        over[static_cast<std::size_t>(i)] =
            empirical_span_coefficient(p_hat, rows, mdp.num_states()) > cutoff ? 1 : 0;
    });
    long count = 0;
    for (unsigned char c : over) count += c;
    return static_cast<double>(count) / samples;
}

std::string resolve_output_path(const std::string& path) {
    if (path.empty() || path.front() == '/') return path;
    const char* dir = std::getenv("IRO_OUTPUT_DIR");
    if (!dir || *dir == '\0') return path;
    std::string out(dir);
    if (out.back() != '/') out += '/';
    return out + path;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_trajectories_csv(std::ostream& out, const std::vector<Trajectory>& trajectories,
                            bool with_gain) {
    out << (with_gain ? "replica,k,error,gain_estimate\n" : "replica,k,error\n");
    for (std::size_t r = 0; r < trajectories.size(); ++r) {
        const Trajectory& traj = trajectories[r];
        for (std::size_t k = 0; k < traj.errors.size(); ++k) {
            out << r << ',' << k << ',' << format_double(traj.errors[k]);
            if (with_gain) {
                out << ',';
                if (k >= 1 && k - 1 < traj.gains.size()) out << format_double(traj.gains[k - 1]);
            }
            out << '\n';
        }
    }
}

void write_replica_errors_csv(std::ostream& out, const ReplicaErrors& errors, int final_k) {
    out << "replica,k,error\n";
    for (std::size_t r = 0; r < errors.at_final.size(); ++r) {
        out << r << ',' << errors.mid_k << ',' << format_double(errors.at_mid[r]) << '\n';
        out << r << ',' << final_k << ',' << format_double(errors.at_final[r]) << '\n';
    }
}

void write_stationary_csv(std::ostream& out, const ChainDistribution& dist) {
    out << "state,mass\n";
    for (std::size_t i = 0; i < dist.mass.size(); ++i)
        out << dist.first_state + static_cast<int>(i) << ',' << format_double(dist.mass[i]) << '\n';
}

void write_dominance_csv(std::ostream& out, const DominanceReport& report) {
    out << "quantile,lhs,rhs,margin,pass\n";
    for (const auto& row : report.rows)
        out << format_double(row.quantile) << ',' << format_double(row.lhs) << ','
            << format_double(row.rhs) << ',' << format_double(row.margin) << ','
            << (row.pass ? 1 : 0) << '\n';
}

std::string tail_report_json(const TailBoundReport& report, const ExperimentConfig& config,
                             const Experiment& exp) {
    nlohmann::ordered_json doc;
    doc["kind"] = to_string(config.kind);
    doc["n"] = config.n;
    doc["iterations"] = config.iterations;
    doc["burn_in"] = config.burn_in;
    doc["replicas"] = config.replicas;
    doc["kappa"] = config.kappa;
    doc["epsilon"] = config.epsilon;
    doc["delta"] = config.delta;
    doc["master_seed"] = config.master_seed;
    doc["alpha"] = exp.alpha;
    doc["wbar"] = exp.wbar;
    doc["empirical_tail"] = report.empirical_tail;
    doc["ci_halfwidth"] = report.ci_halfwidth;
    doc["mid_k"] = report.mid_k;
    doc["mid_tail"] = report.mid_tail;
    doc["stabilized"] = report.stabilized;
    doc["gamma1"] = report.gamma1;
    doc["gamma2"] = report.gamma2;
    doc["p"] = report.certificate.p;
    doc["w"] = report.certificate.w;
    doc["theoretical_bound"] = report.theoretical_bound;
    doc["certificate_valid"] = report.certificate.valid;
    doc["pass"] = report.pass;
    return doc.dump(2);
}

std::string certificate_json(const BoundInputs& inputs, const TailCertificate& cert, double gamma1,
                             double gamma2) {
    nlohmann::ordered_json doc;
    doc["n"] = inputs.n;
    doc["epsilon"] = inputs.epsilon;
    doc["delta"] = inputs.delta;
    doc["kappa"] = inputs.kappa;
    doc["gamma1"] = gamma1;
    doc["gamma2"] = gamma2;
    doc["p"] = cert.p;
    doc["w"] = cert.w;
    doc["bound"] = cert.bound;
    doc["valid"] = cert.valid;
    return doc.dump(2);
}

std::string certificate_csv(const BoundInputs& inputs, const TailCertificate& cert, double gamma1,
                            double gamma2) {
    std::ostringstream out;
    out << "n,epsilon,delta,kappa,gamma1,gamma2,p,w,bound,valid\n";
    out << inputs.n << ',' << format_double(inputs.epsilon) << ',' << format_double(inputs.delta)
        << ',' << format_double(inputs.kappa) << ',' << format_double(gamma1) << ','
        << format_double(gamma2) << ',' << format_double(cert.p) << ',' << cert.w << ','
        << format_double(cert.bound) << ',' << (cert.valid ? 1 : 0) << '\n';
    return out.str();
}

}  // namespace iro
