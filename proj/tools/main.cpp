#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "iro/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitCheckFailed = 2;

void write_file(const std::string& path, const std::string& content) {
    const std::string resolved = iro::resolve_output_path(path);
    std::ofstream out(resolved);
    if (!out) throw std::runtime_error("cannot open output file: " + resolved);
    out << content;
}

std::string vector_line(const std::vector<double>& v) {
    std::ostringstream out;
    out << '(';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out << ", ";
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.12g", v[i]);
        out << buf;
    }
    out << ')';
    return out.str();
}

int cmd_solve_exact(const std::string& mdp_path, const std::string& kind_name, double tol,
                    long max_iter, const std::string& out_path) {
    const iro::FiniteMdp mdp = iro::load_mdp(mdp_path);
    iro::SolveKind kind;
    if (kind_name == "discounted_v")
        kind = iro::SolveKind::DiscountedV;
    else if (kind_name == "average_v")
        kind = iro::SolveKind::AverageV;
    else if (kind_name == "discounted_q")
        kind = iro::SolveKind::DiscountedQ;
    else
        throw std::invalid_argument("unknown solve kind: " + kind_name);

    const iro::SolveResult result = iro::solve_fixed_point(mdp, kind, tol, max_iter);
    if (kind == iro::SolveKind::DiscountedQ) {
        std::cout << "Q* = " << vector_line(result.qvalue.values) << "\n";
    } else {
        std::cout << "v* = " << vector_line(result.value) << "\n";
    }
    if (result.gain) std::cout << "gain = " << *result.gain << "\n";
    std::cout << "iterations = " << result.iterations << "\n";
    std::cout << "residual = " << result.final_residual << "\n";

    if (!out_path.empty()) {
        std::ostringstream json;
        json << "{\n  \"values\": [";
        const std::vector<double>& vals =
            kind == iro::SolveKind::DiscountedQ ? result.qvalue.values : result.value;
        for (std::size_t i = 0; i < vals.size(); ++i)
            json << (i ? "," : "") << iro::format_double(vals[i]);
        json << "],\n  \"gain\": " << (result.gain ? iro::format_double(*result.gain) : "null")
             << ",\n  \"iterations\": " << result.iterations
             << ",\n  \"residual\": " << iro::format_double(result.final_residual) << "\n}\n";
        write_file(out_path, json.str());
    }
    return kExitOk;
}

struct RunOptions {
    std::string mdp_path;
    int n = 100;
    int iterations = 100;
    int replicas = 1;
    std::uint64_t seed = 1;
    std::string out_path;
};

int cmd_run(iro::OperatorMode mode, const RunOptions& opt, const iro::SgdProblem* sgd,
            const std::vector<double>& sgd_start) {
    iro::ExperimentConfig cfg;
    cfg.kind = mode;
    cfg.mdp_path = opt.mdp_path;
    cfg.n = opt.n;
    cfg.iterations = opt.iterations;
    cfg.replicas = opt.replicas;
    cfg.master_seed = opt.seed;
    // kappa/epsilon/delta are irrelevant for a raw trajectory dump; keep the
    // defaults consistent instead of forcing the user to pick them.
    cfg.kappa = 1.0;
    cfg.epsilon = 0.5;
    cfg.delta = 0.05;
    if (sgd) {
        cfg.sgd = *sgd;
        cfg.sgd_start = sgd_start;
    }

    const iro::Experiment exp = iro::Experiment::make(cfg);
    std::vector<iro::Trajectory> trajectories(static_cast<std::size_t>(opt.replicas));
    iro::parallel_for(opt.replicas, [&](int r) {
        trajectories[static_cast<std::size_t>(r)] =
            exp.run_replica(static_cast<std::uint64_t>(r), opt.iterations);
    });

    double mean_final = 0.0;
    for (const auto& traj : trajectories) mean_final += traj.errors.back();
    mean_final /= static_cast<double>(opt.replicas);
    std::cout << "replicas = " << opt.replicas << "\n";
    std::cout << "mean final error = " << mean_final << "\n";

    if (!opt.out_path.empty()) {
        std::ostringstream csv;
        iro::write_trajectories_csv(csv, trajectories, mode == iro::OperatorMode::Ervi);
        write_file(opt.out_path, csv.str());
    }
    return kExitOk;
}

int cmd_stationary(const std::string& chain, double p, int w, int eta, double cap,
                   const std::string& method, int size, double tol, const std::string& out_path) {
    iro::ChainDistribution dist;
    iro::DominanceParams params{p, w, eta};
    const bool closed = method == "closed" || (method.empty() && chain == "Q");
    if (closed) {
        if (chain != "Q")
            throw std::invalid_argument("closed form is available for the Q chain only");
        dist = iro::stationary_q_closed_form(p, w, cap);
    } else {
        iro::ChainKind kind;
        if (chain == "P")
            kind = iro::ChainKind::P;
        else if (chain == "Q")
            kind = iro::ChainKind::Q;
        else if (chain == "Y")
            kind = iro::ChainKind::Y;
        else
            throw std::invalid_argument("unknown chain kind: " + chain);
        int N = size;
        if (N <= 0)
            N = p > iro::q_chain_threshold(w) ? iro::suggested_truncation(p, w, cap) : 4096;
        dist = iro::stationary_numeric(kind, params, N, tol);
    }
    std::ostringstream csv;
    iro::write_stationary_csv(csv, dist);
    if (out_path.empty())
        std::cout << csv.str();
    else
        write_file(out_path, csv.str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"analysis toolkit for iterated random operators: sampled dynamic-programming "
                 "operators, dominating chains, tail certificates and Monte Carlo checks"};
    app.require_subcommand(1);

    // solve-exact
    auto* solve = app.add_subcommand("solve-exact", "solve an exact fixed point");
    std::string solve_mdp, solve_kind = "discounted_v", solve_out;
    double solve_tol = 1e-10;
    long solve_max_iter = 1000000;
    solve->add_option("--mdp", solve_mdp, "MDP JSON file")->required();
    solve->add_option("--kind", solve_kind, "discounted_v|average_v|discounted_q");
    solve->add_option("--tol", solve_tol, "residual tolerance");
    solve->add_option("--max-iter", solve_max_iter, "iteration cap");
    solve->add_option("--out", solve_out, "write solution JSON here");

    // run-evi / run-ervi / run-eqvi
    RunOptions evi_opt, ervi_opt, eqvi_opt;
    auto add_run_options = [](CLI::App* cmd, RunOptions& opt, bool needs_mdp) {
        if (needs_mdp) cmd->add_option("--mdp", opt.mdp_path, "MDP JSON file")->required();
        cmd->add_option("--n", opt.n, "samples per operator application");
        cmd->add_option("--iterations,--K", opt.iterations, "operator applications per replica");
        cmd->add_option("--replicas", opt.replicas, "independent replicas");
        cmd->add_option("--seed", opt.seed, "master seed");
        cmd->add_option("--out", opt.out_path, "trajectory CSV path");
    };
    auto* run_evi = app.add_subcommand("run-evi", "iterate the sampled discounted value operator");
    add_run_options(run_evi, evi_opt, true);
    auto* run_ervi = app.add_subcommand("run-ervi", "iterate the sampled relative value operator");
    add_run_options(run_ervi, ervi_opt, true);
    auto* run_eqvi = app.add_subcommand("run-eqvi", "iterate the sampled Q operator");
    add_run_options(run_eqvi, eqvi_opt, true);

    // run-sgd
    RunOptions sgd_opt;
    int sgd_dimension = 1;
    std::vector<double> sgd_target{0.5};
    std::vector<double> sgd_start;
    double sgd_beta = 0.5;
    auto* run_sgd = app.add_subcommand("run-sgd", "iterate the batch gradient operator");
    add_run_options(run_sgd, sgd_opt, false);
    run_sgd->add_option("--dimension", sgd_dimension, "problem dimension");
    run_sgd->add_option("--target", sgd_target, "minimizer coordinates");
    run_sgd->add_option("--start", sgd_start, "starting point (default origin)");
    run_sgd->add_option("--beta", sgd_beta, "step size in (0,2)");

    // stationary
    auto* stat = app.add_subcommand("stationary", "stationary distribution of a dominating chain");
    std::string stat_chain = "Q", stat_method, stat_out;
    double stat_p = 0.9, stat_tol = 1e-13, stat_cap = 1e-12;
    int stat_w = 1, stat_eta = 0, stat_size = 0;
    stat->add_option("--chain", stat_chain, "P|Q|Y")->required();
    stat->add_option("--p", stat_p, "per-step success probability")->required();
    stat->add_option("--w", stat_w, "up-jump size")->required();
    stat->add_option("--eta", stat_eta, "floor of the Y chain");
    stat->add_option("--cap", stat_cap, "analytic tail cap for truncation");
    stat->add_option("--method", stat_method, "closed|numeric (closed form is Q only)");
    stat->add_option("--size", stat_size, "explicit truncation size for the numeric method");
    stat->add_option("--tol", stat_tol, "power-iteration residual tolerance");
    stat->add_option("--out", stat_out, "CSV path (stdout when omitted)");

    // bound-calc
    auto* bound = app.add_subcommand("bound-calc", "tail certificate arithmetic");
    double bc_p = -1.0, bc_eps = 0.0, bc_delta = 0.0, bc_kappa = 0.0, bc_alpha = 0.0,
           bc_wbar = 0.0, bc_cost = 1.0, bc_gamma1 = 0.0;
    int bc_w = 0, bc_states = 1, bc_actions = 1;
    long bc_n = 0;
    std::string bc_out, bc_format = "json";
    bound->add_option("--p", bc_p, "success probability (direct mode)");
    bound->add_option("--w", bc_w, "up-jump size (direct mode)");
    bound->add_option("--n", bc_n, "sample size (certificate mode)");
    bound->add_option("--epsilon", bc_eps, "noise radius");
    bound->add_option("--delta", bc_delta, "contraction slack");
    bound->add_option("--kappa", bc_kappa, "target error radius");
    bound->add_option("--alpha", bc_alpha, "contraction coefficient");
    bound->add_option("--wbar", bc_wbar, "almost-sure noise bound");
    bound->add_option("--cost-sup", bc_cost, "sup norm of the one-stage cost");
    bound->add_option("--states", bc_states, "number of states");
    bound->add_option("--actions", bc_actions, "number of actions");
    bound->add_option("--gamma1", bc_gamma1, "contraction-coefficient tail bound");
    bound->add_option("--out", bc_out, "report path");
    bound->add_option("--format", bc_format, "csv|json");

    // sample-complexity
    auto* sc = app.add_subcommand("sample-complexity", "smallest n certifying a tail level");
    double sc_kappa = 1.0, sc_conf = 0.1, sc_alpha = 0.9, sc_cost = 1.0;
    int sc_states = 1, sc_actions = 1;
    sc->add_option("--kappa", sc_kappa, "target error radius")->required();
    sc->add_option("--confidence", sc_conf, "tail level gamma")->required();
    sc->add_option("--alpha", sc_alpha, "contraction coefficient")->required();
    sc->add_option("--cost-sup", sc_cost, "sup norm of the one-stage cost");
    sc->add_option("--states", sc_states, "number of states");
    sc->add_option("--actions", sc_actions, "number of actions");

    // dominance-verify
    auto* dom = app.add_subcommand("dominance-verify",
                                   "check the dominating chain against sampled errors");
    std::string dom_mdp, dom_kind = "evi", dom_out;
    int dom_n = 100, dom_step = 50, dom_replicas = 1000, dom_grid = 20;
    double dom_kappa = 0.5, dom_eps = 0.1, dom_delta = 0.4, dom_p = -1.0;
    std::uint64_t dom_seed = 1;
    dom->add_option("--mdp", dom_mdp, "MDP JSON file")->required();
    dom->add_option("--kind", dom_kind, "evi|ervi|eqvi");
    dom->add_option("--n", dom_n, "samples per operator application");
    dom->add_option("--step,--k", dom_step, "iteration index to compare at");
    dom->add_option("--replicas", dom_replicas, "error samples");
    dom->add_option("--kappa", dom_kappa, "target error radius");
    dom->add_option("--epsilon", dom_eps, "noise radius");
    dom->add_option("--delta", dom_delta, "contraction slack");
    dom->add_option("--p", dom_p, "override the estimated success probability");
    dom->add_option("--grid-points", dom_grid, "quantile grid size");
    dom->add_option("--seed", dom_seed, "master seed");
    dom->add_option("--out", dom_out, "report CSV path");

    // experiment
    auto* expcmd = app.add_subcommand("experiment", "tail estimate vs certificate, end to end");
    std::string exp_config, exp_mdp, exp_kind, exp_out;
    int exp_n = -1, exp_iterations = -1, exp_burn_in = -1, exp_replicas = -1;
    double exp_kappa = 0.0, exp_eps = 0.0, exp_delta = 0.0;
    std::int64_t exp_seed = -1;
    expcmd->add_option("--config", exp_config, "experiment config JSON");
    expcmd->add_option("--mdp", exp_mdp, "MDP JSON file");
    expcmd->add_option("--kind", exp_kind, "evi|ervi|eqvi|sgd");
    expcmd->add_option("--n", exp_n, "samples per operator application");
    expcmd->add_option("--iterations,--K", exp_iterations, "operator applications per replica");
    expcmd->add_option("--burn-in", exp_burn_in, "stabilization checkpoint floor");
    expcmd->add_option("--replicas", exp_replicas, "independent replicas");
    expcmd->add_option("--kappa", exp_kappa, "target error radius");
    expcmd->add_option("--epsilon", exp_eps, "noise radius");
    expcmd->add_option("--delta", exp_delta, "contraction slack");
    expcmd->add_option("--seed", exp_seed, "master seed");
    expcmd->add_option("--out", exp_out, "output stem; writes <out>.json and <out>.csv");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (solve->parsed())
            return cmd_solve_exact(solve_mdp, solve_kind, solve_tol, solve_max_iter, solve_out);
        if (run_evi->parsed()) return cmd_run(iro::OperatorMode::Evi, evi_opt, nullptr, {});
        if (run_ervi->parsed()) return cmd_run(iro::OperatorMode::Ervi, ervi_opt, nullptr, {});
        if (run_eqvi->parsed()) return cmd_run(iro::OperatorMode::Eqvi, eqvi_opt, nullptr, {});
        if (run_sgd->parsed()) {
            iro::SgdProblem prob;
            prob.dimension = sgd_dimension;
            prob.target_mean = sgd_target;
            if (static_cast<int>(prob.target_mean.size()) == 1 && sgd_dimension > 1)
                prob.target_mean.assign(static_cast<std::size_t>(sgd_dimension), sgd_target[0]);
            prob.step_size = sgd_beta;
            return cmd_run(iro::OperatorMode::Sgd, sgd_opt, &prob, sgd_start);
        }
        if (stat->parsed())
            return cmd_stationary(stat_chain, stat_p, stat_w, stat_eta, stat_cap, stat_method,
                                  stat_size, stat_tol, stat_out);
        if (bound->parsed()) {
            if (bc_n > 0) {
                iro::BoundInputs inputs;
                inputs.kappa = bc_kappa;
                inputs.epsilon = bc_eps;
                inputs.delta = bc_delta;
                inputs.alpha = bc_alpha;
                inputs.wbar = bc_wbar;
                inputs.cost_sup = bc_cost;
                inputs.num_states = bc_states;
                inputs.num_actions = bc_actions;
                inputs.n = bc_n;
                const iro::TailCertificate cert = iro::make_certificate(inputs, bc_gamma1);
                const double gamma2 = iro::hoeffding_w_tail(inputs);
                std::printf("gamma2 = %.6g\n", gamma2);
                std::printf("p = %.6f\nw = %d\nbound = %.6f\nvalid = %d\n", cert.p, cert.w,
                            cert.bound, cert.valid ? 1 : 0);
                if (!bc_out.empty())
                    write_file(bc_out, bc_format == "csv"
                                           ? iro::certificate_csv(inputs, cert, bc_gamma1, gamma2)
                                           : iro::certificate_json(inputs, cert, bc_gamma1, gamma2));
                return cert.valid ? kExitOk : kExitCheckFailed;
            }
            if (!(bc_p > 0.0) || bc_w < 1)
                throw std::invalid_argument("direct mode needs --p and --w; certificate mode needs --n");
            const double b = iro::tail_bound(bc_p, bc_w);
            const bool valid = bc_p > iro::q_chain_threshold(bc_w);
            std::printf("p = %.6f\nw = %d\nbound = %.6f\nvalid = %d\n", bc_p, bc_w, b, valid ? 1 : 0);
            return kExitOk;
        }
        if (sc->parsed()) {
            const long n = iro::sample_complexity_discounted(sc_kappa, sc_conf, sc_alpha, sc_cost,
                                                             sc_states, sc_actions);
            std::printf("N = %ld\n", n);
            return kExitOk;
        }
        if (dom->parsed()) {
            iro::ExperimentConfig cfg;
            cfg.kind = iro::operator_mode_from_string(dom_kind);
            cfg.mdp_path = dom_mdp;
            cfg.n = dom_n;
            cfg.iterations = std::max(dom_step, 2);
            cfg.replicas = dom_replicas;
            cfg.kappa = dom_kappa;
            cfg.epsilon = dom_eps;
            cfg.delta = dom_delta;
            cfg.master_seed = dom_seed;
            const iro::Experiment exp = iro::Experiment::make(cfg);
            std::optional<double> p_override;
            if (dom_p > 0.0) p_override = dom_p;
            const iro::DominanceExperimentResult result =
                iro::run_dominance_experiment(exp, dom_step, p_override, dom_grid);
            std::printf("joint success = %.6f (ci %.6f)\n", result.joint.joint,
                        result.joint.ci_halfwidth);
            std::printf("p = %.6f, w = %d, eta = %d\n", result.params.p, result.params.w,
                        result.params.eta);
            std::printf("worst margin = %.6g\n", result.report.worst_margin);
            std::printf("%s\n", result.report.all_pass ? "dominance holds on the grid"
                                                       : "dominance violated on the grid");
            if (!dom_out.empty()) {
                std::ostringstream csv;
                iro::write_dominance_csv(csv, result.report);
                write_file(dom_out, csv.str());
            }
            return result.report.all_pass ? kExitOk : kExitCheckFailed;
        }
        if (expcmd->parsed()) {
            iro::ExperimentConfig cfg;
            if (!exp_config.empty()) cfg = iro::ExperimentConfig::from_json_file(exp_config);
            if (!exp_mdp.empty()) cfg.mdp_path = exp_mdp;
            if (!exp_kind.empty()) cfg.kind = iro::operator_mode_from_string(exp_kind);
            if (exp_n > 0) cfg.n = exp_n;
            if (exp_iterations > 0) cfg.iterations = exp_iterations;
            if (exp_burn_in >= 0) cfg.burn_in = exp_burn_in;
            if (exp_replicas > 0) cfg.replicas = exp_replicas;
            if (exp_kappa > 0.0) cfg.kappa = exp_kappa;
            if (exp_eps > 0.0) cfg.epsilon = exp_eps;
            if (exp_delta > 0.0) cfg.delta = exp_delta;
            if (exp_seed >= 0) cfg.master_seed = static_cast<std::uint64_t>(exp_seed);
            if (!exp_out.empty()) cfg.output_path = exp_out;

            const iro::Experiment exp = iro::Experiment::make(cfg);
            iro::ReplicaErrors errors;
            const iro::TailBoundReport report = iro::estimate_tail(exp, &errors);
            std::printf("empirical tail = %.6f (ci %.6f)\n", report.empirical_tail,
                        report.ci_halfwidth);
            std::printf("theoretical bound = %.6g (p = %.6f, w = %d, valid = %d)\n",
                        report.theoretical_bound, report.certificate.p, report.certificate.w,
                        report.certificate.valid ? 1 : 0);
            std::printf("stabilized = %d, pass = %d\n", report.stabilized ? 1 : 0,
                        report.pass ? 1 : 0);
            if (!cfg.output_path.empty()) {
                write_file(cfg.output_path + ".json", iro::tail_report_json(report, cfg, exp));
                std::ostringstream csv;
                iro::write_replica_errors_csv(csv, errors, cfg.iterations);
                write_file(cfg.output_path + ".csv", csv.str());
            }
            return report.pass ? kExitOk : kExitCheckFailed;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
