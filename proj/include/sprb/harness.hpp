#pragma once
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sprb/baselines.hpp"
#include "sprb/confseq.hpp"
#include "sprb/model.hpp"
#include "sprb/sprb.hpp"

namespace sprb {

enum class Algorithm { SprbBasic, SprbFull, SprbOracleGamma, Rm, OracleRm, Asa };

inline const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::SprbBasic: return "sprb_basic";
        case Algorithm::SprbFull: return "sprb_full";
        case Algorithm::SprbOracleGamma: return "sprb_oracle_gamma";
        case Algorithm::Rm: return "rm";
        case Algorithm::OracleRm: return "oracle_rm";
        case Algorithm::Asa: return "asa";
    }
    throw std::logic_error("algorithm_name: unknown algorithm");
}

inline std::optional<Algorithm> parse_algorithm(const std::string& s) {
    if (s == "sprb" || s == "sprb_basic") return Algorithm::SprbBasic;
    if (s == "sprb_full") return Algorithm::SprbFull;
    if (s == "sprb_oracle_gamma") return Algorithm::SprbOracleGamma;
    if (s == "rm" || s == "sa") return Algorithm::Rm;
    if (s == "oracle_rm" || s == "oracle_sa") return Algorithm::OracleRm;
    if (s == "asa") return Algorithm::Asa;
    return std::nullopt;
}

inline bool is_sprb_algorithm(Algorithm a) {
    return a == Algorithm::SprbBasic || a == Algorithm::SprbFull ||
           a == Algorithm::SprbOracleGamma;
}

struct ExperimentConfig {
    RegressionProblem problem;
    std::vector<Algorithm> algorithms{Algorithm::SprbBasic, Algorithm::Rm};
    long long reps = 100;
    int max_stages = 5;
    uint64_t master_seed = 1;
    double delta_tol = 0.3;
    double x1 = 0.5;                           // baseline start: interval midpoint
    std::string output_path;
    double width_switch = -1.0;                // <= 0: SprbConfig default
    std::optional<long long> sample_budget;    // per-replication cap for SPRB
    double oracle_gamma = 3.0;                 // exponent for SprbOracleGamma
    double rm_alpha = 1.0;                     // fixed RM step constant
};

struct ComparisonRow {
    std::string algorithm;
    double mean_abs_error = 0.0;
    double std_error = 0.0;
    double mean_samples = 0.0;
};

inline SprbConfig make_sprb_config(const ExperimentConfig& cfg, Algorithm algo) {
    SprbConfig sc;
    sc.delta_tol = cfg.delta_tol;
    sc.interval_lo = cfg.problem.interval_lo;
    sc.interval_hi = cfg.problem.interval_hi;
    sc.width_switch = cfg.width_switch;
    sc.max_stages = cfg.max_stages;
    sc.sample_budget = cfg.sample_budget;
    // boundary scale must stay positive even for noiseless problems
    sc.boundary.sigma = std::max(cfg.problem.noise.sigma, 1e-12);
    if (algo == Algorithm::SprbFull) sc.variant = SprbVariant::Full;
    else if (algo == Algorithm::SprbOracleGamma) {
        sc.variant = SprbVariant::OracleGamma;
        sc.gamma = cfg.oracle_gamma;
    }
    return sc;
}

inline uint64_t sprb_stream_id(Algorithm algo) {
    switch (algo) {
        case Algorithm::SprbBasic: return 0;
        case Algorithm::SprbFull: return 2;
        case Algorithm::SprbOracleGamma: return 3;
        default: return 1;  // all baselines share one stream per replication
    }
}

// Budget-matched comparison: per replication, SPRB runs first and its sample
// count becomes the draw budget for every baseline in that replication.
// Baselines share a common noise stream (independent of SPRB's), so two
// baselines that coincide in law produce identical trajectories.
inline std::vector<ComparisonRow> run_comparison(const ExperimentConfig& cfg) {
    if (cfg.reps < 1) throw std::invalid_argument("run_comparison: reps must be >= 1");
    bool has_sprb = false;
    for (Algorithm a : cfg.algorithms) has_sprb = has_sprb || is_sprb_algorithm(a);
    if (!has_sprb)
        throw std::invalid_argument("run_comparison: an sprb algorithm must set the budget");

    const double theta = cfg.problem.f.theta;
    std::vector<std::vector<double>> errors(cfg.algorithms.size());
    std::vector<double> sample_sums(cfg.algorithms.size(), 0.0);

    for (long long rep = 0; rep < cfg.reps; ++rep) {
        long long n_rep = -1;
        for (size_t ai = 0; ai < cfg.algorithms.size(); ++ai) {
            const Algorithm algo = cfg.algorithms[ai];
            if (!is_sprb_algorithm(algo)) continue;
            SamplingOracle oracle(cfg.problem,
                                  derive_rng(cfg.master_seed, uint64_t(rep), sprb_stream_id(algo)));
            const SprbResult r = run_sprb(make_sprb_config(cfg, algo), oracle);
            errors[ai].push_back(std::fabs(r.estimate - theta));
            sample_sums[ai] += double(r.total_samples);
            if (n_rep < 0) n_rep = r.total_samples;
        }
        const long long n_eff = std::max(n_rep, 2LL);
        for (size_t ai = 0; ai < cfg.algorithms.size(); ++ai) {
            const Algorithm algo = cfg.algorithms[ai];
            if (is_sprb_algorithm(algo)) continue;
            SamplingOracle oracle(cfg.problem, derive_rng(cfg.master_seed, uint64_t(rep), 1));
            Trajectory traj;
            RmConfig rc;
            rc.clip_lo = cfg.problem.interval_lo;
            rc.clip_hi = cfg.problem.interval_hi;
            switch (algo) {
                case Algorithm::Rm:
                    rc.alpha = cfg.rm_alpha;
                    traj = rm_run(oracle, rc, n_eff, cfg.x1, n_eff);
                    break;
                case Algorithm::OracleRm: {
                    if (cfg.problem.f.family != Family::Linear &&
                        !(cfg.problem.f.family == Family::PowerSign && cfg.problem.f.gamma == 1.0))
                        throw std::invalid_argument(
                            "run_comparison: oracle_rm needs a nonzero slope at the root");
                    traj = oracle_rm_run(oracle, cfg.problem.f.beta, n_eff, cfg.x1,
                                         rc.clip_lo, rc.clip_hi, n_eff);
                    break;
                }
                case Algorithm::Asa:
                    rc.mode = RmMode::Adaptive;
                    traj = asa_run(oracle, rc, n_eff, cfg.x1, n_eff);
                    break;
                default:
                    throw std::logic_error("run_comparison: unexpected algorithm");
            }
            errors[ai].push_back(std::fabs(traj.final_estimate - theta));
            sample_sums[ai] += double(traj.samples_used);
        }
    }

    std::vector<ComparisonRow> rows;
    for (size_t ai = 0; ai < cfg.algorithms.size(); ++ai) {
        const auto& e = errors[ai];
        double mean = 0.0;
        for (double v : e) mean += v;
        mean /= double(e.size());
        double var = 0.0;
        for (double v : e) var += (v - mean) * (v - mean);
        const double sd = e.size() > 1 ? std::sqrt(var / double(e.size() - 1)) : 0.0;
        rows.push_back({algorithm_name(cfg.algorithms[ai]), mean,
                        sd / std::sqrt(double(e.size())),
                        sample_sums[ai] / double(e.size())});
    }
    return rows;
}

struct Summary {
    double mean = 0.0;
    double std_error = 0.0;
    double q10 = 0.0;
    double q50 = 0.0;
    double q90 = 0.0;
};

// Quantile with linear interpolation between order statistics at position
// p * (n - 1).
inline double quantile_linear(std::vector<double> sorted_values, double p) {
    if (sorted_values.empty()) throw std::invalid_argument("quantile_linear: empty input");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile_linear: p outside [0,1]");
    const double pos = p * double(sorted_values.size() - 1);
    const size_t lo = size_t(pos);
    const double frac = pos - double(lo);
    if (lo + 1 >= sorted_values.size()) return sorted_values.back();
    return sorted_values[lo] * (1.0 - frac) + sorted_values[lo + 1] * frac;
}

inline Summary summarize(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("summarize: empty input");
    Summary s;
    for (double v : values) s.mean += v;
    s.mean /= double(values.size());
    double var = 0.0;
    for (double v : values) var += (v - s.mean) * (v - s.mean);
    const double sd = values.size() > 1 ? std::sqrt(var / double(values.size() - 1)) : 0.0;
    s.std_error = sd / std::sqrt(double(values.size()));
    std::sort(values.begin(), values.end());
    s.q10 = quantile_linear(values, 0.10);
    s.q50 = quantile_linear(values, 0.50);
    s.q90 = quantile_linear(values, 0.90);
    return s;
}

// Shortest representation that round-trips a double exactly.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : path_(path), fp_(std::fopen(path.c_str(), "wb")) {
        if (!fp_) throw std::runtime_error("cannot open for writing: " + path);
    }
    ~CsvWriter() {
        if (fp_) std::fclose(fp_);
    }
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) std::fputc(',', fp_);
            std::fputs(cells[i].c_str(), fp_);
        }
        std::fputc('\n', fp_);
        if (std::ferror(fp_)) throw std::runtime_error("write failed: " + path_);
    }

private:
    std::string path_;
    std::FILE* fp_;
};

inline void trajectory_export(const Trajectory& traj, const std::string& algorithm,
                              double theta, const std::string& path) {
    CsvWriter w(path);
    w.row({"algorithm", "sample_index", "estimate", "abs_error"});
    for (const auto& [i, x] : traj.iterates) {
        w.row({algorithm, std::to_string(i), format_double(x),
               format_double(std::fabs(x - theta))});
    }
}

// SPRB rows are per stage: index is the stage number, estimate is that
// stage's query point.
inline void trajectory_export(const SprbResult& res, const std::string& algorithm,
                              double theta, const std::string& path) {
    CsvWriter w(path);
    w.row({"algorithm", "sample_index", "estimate", "abs_error"});
    for (const auto& r : res.stage_records) {
        if (r.stage_index > res.stages_completed) break;
        w.row({algorithm, std::to_string(r.stage_index), format_double(r.x_next),
               format_double(std::fabs(r.x_next - theta))});
    }
}

inline void comparison_export(const std::vector<ComparisonRow>& rows, const std::string& path) {
    CsvWriter w(path);
    w.row({"algorithm", "mean_abs_error", "std_error", "mean_samples"});
    for (const auto& r : rows) {
        w.row({r.algorithm, format_double(r.mean_abs_error), format_double(r.std_error),
               format_double(r.mean_samples)});
    }
}

// Empirical time-uniform coverage of the stage intervals.
inline CoverageReport coverage_experiment(const RegressionProblem& problem,
                                          const SprbConfig& base_cfg, long long reps,
                                          uint64_t master_seed) {
    if (reps < 1) throw std::invalid_argument("coverage_experiment: reps must be >= 1");
    CoverageReport rep_out;
    rep_out.reps = reps;
    std::vector<double> width_sums;
    std::vector<long long> width_counts;
    SprbConfig cfg = base_cfg;
    cfg.interval_lo = problem.interval_lo;
    cfg.interval_hi = problem.interval_hi;
    cfg.boundary.sigma = std::max(problem.noise.sigma, 1e-12);
    for (long long r = 0; r < reps; ++r) {
        SamplingOracle oracle(problem, derive_rng(master_seed, uint64_t(r), 0));
        const SprbResult res = run_sprb(cfg, oracle);
        if (first_violation(res.confidence_sequence, problem.f.theta)) ++rep_out.violations;
        for (const auto& e : res.confidence_sequence.entries) {
            const size_t idx = size_t(e.stage - 1);
            if (idx >= width_sums.size()) {
                width_sums.resize(idx + 1, 0.0);
                width_counts.resize(idx + 1, 0);
            }
            width_sums[idx] += e.x_right - e.x_left;
            ++width_counts[idx];
        }
    }
    rep_out.violation_rate = double(rep_out.violations) / double(reps);
    rep_out.wilson_upper = wilson_upper_bound(rep_out.violations, reps);
    for (size_t i = 0; i < width_sums.size(); ++i) {
        rep_out.mean_width_by_stage.push_back(
            width_counts[i] > 0 ? width_sums[i] / double(width_counts[i]) : 0.0);
    }
    return rep_out;
}

// Replicated stage sampling at a location with known signal mu (linear f
// through the origin queried at x = mu).
struct StoppingRow {
    double mu = 0.0;
    double alpha_t = 0.0;
    double mean_N = 0.0;
    double expected_N = 0.0;   // delta ln(delta + 1)
    double ratio = 0.0;        // mean_N / expected_N
};

inline SamplingOracle make_signal_oracle(double sigma, uint64_t seed, uint64_t rep) {
    RegressionProblem p;
    p.f = RegressionFunction::linear(1.0, 0.0);
    p.noise = NoiseModel{NoiseKind::Gaussian, sigma};
    p.interval_lo = -1e9;
    p.interval_hi = 1e9;
    return SamplingOracle(p, derive_rng(seed, rep, 0));
}

inline StoppingRow stopping_study(double mu, double sigma, int t, double alpha,
                                  long long reps, uint64_t master_seed) {
    if (reps < 1) throw std::invalid_argument("stopping_study: reps must be >= 1");
    BoundaryConfig bc{sigma, alpha, true};
    const double alpha_t = stage_alpha(alpha, t);
    double sum_n = 0.0;
    for (long long r = 0; r < reps; ++r) {
        SamplingOracle oracle = make_signal_oracle(sigma, master_seed, uint64_t(r));
        const StoppingOutcome o = stage_sampling(oracle, mu, t, bc);
        sum_n += double(o.n_samples);
    }
    StoppingRow row;
    row.mu = mu;
    row.alpha_t = alpha_t;
    row.mean_N = sum_n / double(reps);
    row.expected_N = expected_N_theory(mu, alpha_t, sigma);
    row.ratio = row.mean_N / row.expected_N;
    return row;
}

struct CltRow {
    double mean_z = 0.0;      // mean of sqrt(N) (M - mu) / sigma
    double var_z = 0.0;
    long long reps = 0;
};

inline CltRow clt_study(double mu, double sigma, int t, double alpha, long long reps,
                        uint64_t master_seed) {
    if (reps < 2) throw std::invalid_argument("clt_study: reps must be >= 2");
    BoundaryConfig bc{sigma, alpha, true};
    RunningStats z_stats;
    for (long long r = 0; r < reps; ++r) {
        SamplingOracle oracle = make_signal_oracle(sigma, master_seed, uint64_t(r));
        const StoppingOutcome o = stage_sampling(oracle, mu, t, bc);
        z_stats.add(std::sqrt(double(o.n_samples)) * (o.mean - mu) / sigma);
    }
    return {z_stats.mean(), z_stats.variance(), reps};
}

struct FalseSignRow {
    int t = 0;
    double alpha_t = 0.0;
    double rate = 0.0;
    double mc_se = 0.0;        // Monte Carlo standard error of the rate
};

inline FalseSignRow false_sign_study(double mu, double sigma, int t, double alpha,
                                     long long reps, uint64_t master_seed) {
    if (reps < 1) throw std::invalid_argument("false_sign_study: reps must be >= 1");
    if (mu == 0.0) throw std::invalid_argument("false_sign_study: mu must be nonzero");
    BoundaryConfig bc{sigma, alpha, true};
    long long wrong = 0;
    for (long long r = 0; r < reps; ++r) {
        SamplingOracle oracle = make_signal_oracle(sigma, master_seed, uint64_t(r));
        const StoppingOutcome o = stage_sampling(oracle, mu, t, bc);
        if ((o.mean > 0.0) != (mu > 0.0)) ++wrong;
    }
    FalseSignRow row;
    row.t = t;
    row.alpha_t = stage_alpha(alpha, t);
    row.rate = double(wrong) / double(reps);
    row.mc_se = std::sqrt(std::max(row.rate * (1.0 - row.rate), 1.0 / double(reps)) / double(reps));
    return row;
}

} // namespace sprb
