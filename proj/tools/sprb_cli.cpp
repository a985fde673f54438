#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sprb/config_io.hpp"
#include "sprb/harness.hpp"

namespace {

using namespace sprb;

struct CommonFlags {
    std::string config_path;
    std::string family = "linear";
    std::string noise = "gaussian";
    std::string out;
    double beta = 1.0, gamma = 3.0, theta = 0.3, sigma = 1.0;
    double mu_minus = 1.0, mu_plus = 1.0;
    double interval_lo = 0.0, interval_hi = 1.0;
    int stages = 5;
    long long budget = -1;
    long long reps = 100;
    std::uint64_t seed = 1;
    double delta = 0.3;
    double x1 = 0.5;
    double width_switch = -1.0;

    CLI::Option* o_family = nullptr;
    CLI::Option* o_noise = nullptr;
    CLI::Option* o_beta = nullptr;
    CLI::Option* o_gamma = nullptr;
    CLI::Option* o_theta = nullptr;
    CLI::Option* o_sigma = nullptr;
    CLI::Option* o_mu_minus = nullptr;
    CLI::Option* o_mu_plus = nullptr;
    CLI::Option* o_interval_lo = nullptr;
    CLI::Option* o_interval_hi = nullptr;
    CLI::Option* o_stages = nullptr;
    CLI::Option* o_budget = nullptr;
    CLI::Option* o_reps = nullptr;
    CLI::Option* o_seed = nullptr;
    CLI::Option* o_delta = nullptr;
    CLI::Option* o_x1 = nullptr;
    CLI::Option* o_width_switch = nullptr;
    CLI::Option* o_out = nullptr;
};

void add_common_flags(CLI::App* sub, CommonFlags& f, bool out_required) {
    sub->add_option("--config", f.config_path, "JSON experiment config; flags override file values");
    f.o_family = sub->add_option("--family", f.family, "regression family: linear|power_sign|jump");
    f.o_noise = sub->add_option("--noise", f.noise, "noise kind: gaussian|uniform|rademacher");
    f.o_beta = sub->add_option("--beta", f.beta, "slope / scale of the regression function");
    f.o_gamma = sub->add_option("--gamma", f.gamma, "power_sign exponent (>= 1)");
    f.o_theta = sub->add_option("--theta", f.theta, "true root");
    f.o_sigma = sub->add_option("--sigma", f.sigma, "noise standard deviation");
    f.o_mu_minus = sub->add_option("--mu-minus", f.mu_minus, "left jump magnitude");
    f.o_mu_plus = sub->add_option("--mu-plus", f.mu_plus, "right jump magnitude");
    f.o_interval_lo = sub->add_option("--lo", f.interval_lo, "left end of the search interval");
    f.o_interval_hi = sub->add_option("--hi", f.interval_hi, "right end of the search interval");
    f.o_stages = sub->add_option("--stages", f.stages, "number of SPRB stages k");
    f.o_budget = sub->add_option("--budget", f.budget, "per-run sample cap (-1: unlimited)");
    f.o_reps = sub->add_option("--reps", f.reps, "Monte Carlo replications");
    f.o_seed = sub->add_option("--seed", f.seed, "master RNG seed");
    f.o_delta = sub->add_option("--delta", f.delta, "confidence tolerance Delta in (0, 1/2)");
    f.o_x1 = sub->add_option("--x1", f.x1, "baseline starting point");
    f.o_width_switch = sub->add_option("--width-switch", f.width_switch,
                                       "bisection->weight-section width threshold");
    f.o_out = sub->add_option("--out", f.out, "output CSV path");
    if (out_required) f.o_out->required();
}

ExperimentConfig resolve_config(const CommonFlags& f) {
    const bool have_file = !f.config_path.empty();
    ExperimentConfig cfg;
    if (have_file) cfg = load_experiment_config(f.config_path);
    auto use_flag = [&](CLI::Option* o) { return !have_file || (o && o->count() > 0); };

    Family fam = have_file ? cfg.problem.f.family : Family::Linear;
    if (use_flag(f.o_family)) fam = parse_family(f.family);
    if (f.o_gamma->count() > 0 && fam == Family::Linear)
        throw CLI::ValidationError("--gamma", "only valid with --family power_sign");
    if ((f.o_mu_minus->count() > 0 || f.o_mu_plus->count() > 0) && fam != Family::Jump)
        throw CLI::ValidationError("--mu-minus/--mu-plus", "only valid with --family jump");

    double beta = use_flag(f.o_beta) ? f.beta : cfg.problem.f.beta;
    double gamma = use_flag(f.o_gamma) ? f.gamma : cfg.problem.f.gamma;
    double theta = use_flag(f.o_theta) ? f.theta : cfg.problem.f.theta;
    double mu_minus = use_flag(f.o_mu_minus) ? f.mu_minus : cfg.problem.f.mu_minus;
    double mu_plus = use_flag(f.o_mu_plus) ? f.mu_plus : cfg.problem.f.mu_plus;
    if (fam == Family::Linear) gamma = 1.0;
    cfg.problem.f = make_regression(fam, beta, gamma, theta, mu_minus, mu_plus);

    if (use_flag(f.o_noise)) cfg.problem.noise.kind = parse_noise(f.noise);
    if (use_flag(f.o_sigma)) cfg.problem.noise.sigma = f.sigma;
    if (use_flag(f.o_interval_lo)) cfg.problem.interval_lo = f.interval_lo;
    if (use_flag(f.o_interval_hi)) cfg.problem.interval_hi = f.interval_hi;
    if (use_flag(f.o_stages)) cfg.max_stages = f.stages;
    if (use_flag(f.o_reps)) cfg.reps = f.reps;
    if (use_flag(f.o_seed)) cfg.master_seed = f.seed;
    if (use_flag(f.o_delta)) cfg.delta_tol = f.delta;
    if (use_flag(f.o_x1)) cfg.x1 = f.x1;
    if (use_flag(f.o_width_switch)) cfg.width_switch = f.width_switch;
    if (use_flag(f.o_budget)) {
        if (f.budget > 0) cfg.sample_budget = f.budget;
        else cfg.sample_budget.reset();
    }
    if (f.o_out->count() > 0 || !have_file) cfg.output_path = f.out;
    if (fam == Family::PowerSign) cfg.oracle_gamma = gamma;
    return cfg;
}

int cmd_simulate(const CommonFlags& f, const std::string& algo_name_arg, double rm_alpha) {
    const auto algo = parse_algorithm(algo_name_arg);
    if (!algo) throw CLI::ValidationError("--algo", "unknown algorithm: " + algo_name_arg);
    ExperimentConfig cfg = resolve_config(f);
    cfg.rm_alpha = rm_alpha;
    const double theta = cfg.problem.f.theta;

    if (is_sprb_algorithm(*algo)) {
        SamplingOracle oracle(cfg.problem, derive_rng(cfg.master_seed, 0, sprb_stream_id(*algo)));
        const SprbResult res = run_sprb(make_sprb_config(cfg, *algo), oracle);
        trajectory_export(res, algorithm_name(*algo), theta, cfg.output_path);
        return 0;
    }

    const long long n = cfg.sample_budget ? *cfg.sample_budget : 1000;
    const long long stride = n <= 100000 ? 1 : n / 100000;
    SamplingOracle oracle(cfg.problem, derive_rng(cfg.master_seed, 0, 1));
    RmConfig rc;
    rc.alpha = cfg.rm_alpha;
    rc.clip_lo = cfg.problem.interval_lo;
    rc.clip_hi = cfg.problem.interval_hi;
    Trajectory traj;
    switch (*algo) {
        case Algorithm::Rm:
            traj = rm_run(oracle, rc, n, cfg.x1, stride);
            break;
        case Algorithm::OracleRm:
            traj = oracle_rm_run(oracle, cfg.problem.f.beta, n, cfg.x1, rc.clip_lo, rc.clip_hi,
                                 stride);
            break;
        case Algorithm::Asa:
            rc.mode = RmMode::Adaptive;
            traj = asa_run(oracle, rc, n, cfg.x1, stride);
            break;
        default:
            throw CLI::ValidationError("--algo", "unsupported algorithm");
    }
    trajectory_export(traj, algorithm_name(*algo), theta, cfg.output_path);
    return 0;
}

std::vector<Algorithm> parse_algorithm_list(const std::string& csv) {
    std::vector<Algorithm> out;
    std::string cur;
    auto flush = [&]() {
        if (cur.empty()) return;
        const auto a = parse_algorithm(cur);
        if (!a) throw CLI::ValidationError("--algos", "unknown algorithm: " + cur);
        out.push_back(*a);
        cur.clear();
    };
    for (char c : csv) {
        if (c == ',') flush();
        else cur.push_back(c);
    }
    flush();
    if (out.empty()) throw CLI::ValidationError("--algos", "empty algorithm list");
    return out;
}

int cmd_compare(const CommonFlags& f, const std::string& algos_csv, bool algos_given,
                double rm_alpha) {
    ExperimentConfig cfg = resolve_config(f);
    cfg.rm_alpha = rm_alpha;
    if (algos_given || f.config_path.empty()) cfg.algorithms = parse_algorithm_list(algos_csv);
    const auto rows = run_comparison(cfg);
    comparison_export(rows, cfg.output_path);
    std::printf("algorithm,mean_abs_error,std_error,mean_samples\n");
    for (const auto& r : rows) {
        std::printf("%s,%s,%s,%s\n", r.algorithm.c_str(), format_double(r.mean_abs_error).c_str(),
                    format_double(r.std_error).c_str(), format_double(r.mean_samples).c_str());
    }
    return 0;
}

int cmd_coverage(const CommonFlags& f) {
    ExperimentConfig cfg = resolve_config(f);
    SprbConfig sc = make_sprb_config(cfg, Algorithm::SprbBasic);
    const CoverageReport rep = coverage_experiment(cfg.problem, sc, cfg.reps, cfg.master_seed);
    {
        CsvWriter w(cfg.output_path);
        w.row({"delta", "reps", "violations", "violation_rate", "wilson_upper"});
        w.row({format_double(cfg.delta_tol), std::to_string(rep.reps),
               std::to_string(rep.violations), format_double(rep.violation_rate),
               format_double(rep.wilson_upper)});
    }
    std::printf("stage,mean_width\n");
    for (size_t i = 0; i < rep.mean_width_by_stage.size(); ++i) {
        std::printf("%zu,%s\n", i + 1, format_double(rep.mean_width_by_stage[i]).c_str());
    }
    return 0;
}

int cmd_stopping(const CommonFlags& f, const std::vector<double>& mus, int t, double alpha) {
    ExperimentConfig cfg = resolve_config(f);
    CsvWriter w(cfg.output_path);
    w.row({"mu", "alpha_t", "mean_N", "expected_N", "ratio"});
    for (double mu : mus) {
        const StoppingRow row =
            stopping_study(mu, cfg.problem.noise.sigma, t, alpha, cfg.reps, cfg.master_seed);
        w.row({format_double(row.mu), format_double(row.alpha_t), format_double(row.mean_N),
               format_double(row.expected_N), format_double(row.ratio)});
    }
    return 0;
}

int cmd_clt(const CommonFlags& f, double mu, int t, double alpha) {
    ExperimentConfig cfg = resolve_config(f);
    const CltRow row = clt_study(mu, cfg.problem.noise.sigma, t, alpha, cfg.reps, cfg.master_seed);
    CsvWriter w(cfg.output_path);
    w.row({"mu", "t", "reps", "mean_z", "var_z"});
    w.row({format_double(mu), std::to_string(t), std::to_string(row.reps),
           format_double(row.mean_z), format_double(row.var_z)});
    return 0;
}

int cmd_schedule(long long k_max, const std::string& out) {
    const auto grid = grid_schedule(k_max);
    if (!out.empty()) {
        CsvWriter w(out);
        w.row({"stage"});
        for (long long t : grid) w.row({std::to_string(t)});
    } else {
        std::printf("stage\n");
        for (long long t : grid) std::printf("%lld\n", t);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sequential probability ratio bisection: noisy root-finding experiments"};
    app.require_subcommand(1);

    CommonFlags sim_f, cmp_f, cov_f, stop_f, clt_f;
    std::string sim_algo;
    double sim_rm_alpha = 1.0;
    auto* sim = app.add_subcommand("simulate", "run one algorithm, export its trajectory");
    sim->add_option("--algo", sim_algo, "sprb_basic|sprb_full|sprb_oracle_gamma|rm|oracle_rm|asa")
        ->required();
    sim->add_option("--alpha", sim_rm_alpha, "RM step constant");
    add_common_flags(sim, sim_f, true);

    std::string cmp_algos = "sprb_basic,rm,oracle_rm,asa";
    double cmp_rm_alpha = 1.0;
    auto* cmp = app.add_subcommand("compare", "budget-matched error comparison table");
    auto* cmp_algos_opt = cmp->add_option("--algos", cmp_algos, "comma-separated algorithm list");
    cmp->add_option("--alpha", cmp_rm_alpha, "RM step constant");
    add_common_flags(cmp, cmp_f, true);

    auto* cov = app.add_subcommand("coverage", "time-uniform coverage of the stage intervals");
    add_common_flags(cov, cov_f, true);

    std::vector<double> stop_mus{0.5, 0.2, 0.1, 0.05};
    int stop_t = 4;
    double stop_alpha = 0.1;
    auto* stop = app.add_subcommand("stopping", "stopping-time law of stage sampling");
    stop->add_option("--mu", stop_mus, "signal magnitudes to sweep");
    stop->add_option("--t", stop_t, "stage index");
    stop->add_option("--alpha-total", stop_alpha, "total error budget alpha");
    add_common_flags(stop, stop_f, true);

    double clt_mu = 0.05;
    int clt_t = 8;
    double clt_alpha = 0.1;
    auto* clt = app.add_subcommand("clt", "standardized moments of the stopped average");
    clt->add_option("--mu", clt_mu, "signal magnitude");
    clt->add_option("--t", clt_t, "stage index");
    clt->add_option("--alpha-total", clt_alpha, "total error budget alpha");
    add_common_flags(clt, clt_f, true);

    long long sched_k = 11;
    std::string sched_out;
    auto* sched = app.add_subcommand("schedule", "print the hybrid bisection grid");
    sched->add_option("--k", sched_k, "largest stage index");
    sched->add_option("--out", sched_out, "output CSV path (default: stdout)");

    try {
        app.parse(argc, argv);
        if (sim->parsed()) return cmd_simulate(sim_f, sim_algo, sim_rm_alpha);
        if (cmp->parsed())
            return cmd_compare(cmp_f, cmp_algos, cmp_algos_opt->count() > 0, cmp_rm_alpha);
        if (cov->parsed()) return cmd_coverage(cov_f);
        if (stop->parsed()) return cmd_stopping(stop_f, stop_mus, stop_t, stop_alpha);
        if (clt->parsed()) return cmd_clt(clt_f, clt_mu, clt_t, clt_alpha);
        if (sched->parsed()) return cmd_schedule(sched_k, sched_out);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
