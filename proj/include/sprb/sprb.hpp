#pragma once
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sprb/boundary.hpp"
#include "sprb/confseq.hpp"
#include "sprb/model.hpp"

namespace sprb {

// One bracketing stage: interval, endpoint estimates with the sample counts
// attributed to them, and the query point chosen at this stage.
struct StageRecord {
    double x_left = 0.0;
    double x_right = 0.0;
    double fhat_left = -1.0;
    double fhat_right = 1.0;
    long long n_left = 1;
    long long n_right = 1;
    double x_next = 0.0;
    int stage_index = 1;
};

enum class SprbVariant { Basic, Full, OracleGamma };

struct SprbConfig {
    double delta_tol = 0.3;          // Delta in (0, 1/2); internal alpha = Delta/3
    double interval_lo = 0.0;
    double interval_hi = 1.0;
    double width_switch = -1.0;      // <= 0 means default 0.25*(hi - lo)
    int max_stages = 5;
    std::optional<long long> sample_budget;
    SprbVariant variant = SprbVariant::Basic;
    double gamma = 1.0;              // exponent for the OracleGamma rule
    BoundaryConfig boundary;         // sigma / sigma_known; alpha is overridden
};

inline double sprb_alpha(const SprbConfig& cfg) { return cfg.delta_tol / 3.0; }

inline double effective_width_switch(const SprbConfig& cfg) {
    return cfg.width_switch > 0.0 ? cfg.width_switch
                                  : 0.25 * (cfg.interval_hi - cfg.interval_lo);
}

inline void validate_config(const SprbConfig& cfg) {
    if (!(cfg.delta_tol > 0.0 && cfg.delta_tol < 0.5))
        throw std::invalid_argument("SprbConfig: delta_tol must be in (0, 1/2)");
    if (!(cfg.interval_lo < cfg.interval_hi))
        throw std::invalid_argument("SprbConfig: empty initial interval");
    if (!(effective_width_switch(cfg) < cfg.interval_hi - cfg.interval_lo))
        throw std::invalid_argument("SprbConfig: width_switch must be below the interval width");
    if (cfg.max_stages < 1)
        throw std::invalid_argument("SprbConfig: max_stages must be >= 1");
    if (cfg.variant == SprbVariant::OracleGamma && !(cfg.gamma >= 1.0))
        throw std::invalid_argument("SprbConfig: gamma must be >= 1");
}

inline double bisection_point(double x_left, double x_right) {
    return 0.5 * (x_left + x_right);
}

// Secant-style interpolation; interior to the bracket whenever
// f_left < 0 < f_right. Exact at the root for linear regression functions.
inline double weight_section_point(double x_left, double x_right,
                                   double f_left, double f_right) {
    if (!(f_left < 0.0 && f_right > 0.0))
        throw std::runtime_error("weight_section_point: sign invariant broken");
    return (f_left * x_right - f_right * x_left) / (f_left - f_right);
}

// Higher-order interpolation using uncentered powers of the endpoints; the
// raw point can leave the bracket, so it is clamped back in.
inline double higher_order_point(double x_left, double x_right,
                                 double f_left, double f_right, double gamma) {
    if (!(f_left < 0.0 && f_right > 0.0))
        throw std::runtime_error("higher_order_point: sign invariant broken");
    if (!(gamma >= 1.0)) throw std::invalid_argument("higher_order_point: gamma must be >= 1");
    const double raw = (f_left * std::pow(x_right, gamma) - f_right * std::pow(x_left, gamma)) /
                       (f_left - f_right);
    return std::min(std::max(raw, x_left), x_right);
}

// Extra samples drawn at the opposite endpoint: max(1, ceil((log2(t+1)-1)*n)).
inline long long sharp_sample_count(int t, long long n_prev) {
    if (t < 1) throw std::domain_error("sharp_sample_count: t must be >= 1");
    if (n_prev < 1) throw std::domain_error("sharp_sample_count: n_prev must be >= 1");
    const double factor = std::log2(double(t) + 1.0) - 1.0;
    const double raw = std::ceil(factor * double(n_prev));
    return raw < 1.0 ? 1 : (long long)(raw);
}

enum class SectionRule { Bisection, WeightSection, OracleGamma };

inline double section_point(SectionRule rule, const StageRecord& r, double gamma) {
    switch (rule) {
        case SectionRule::Bisection:
            return bisection_point(r.x_left, r.x_right);
        case SectionRule::WeightSection:
            if (r.x_left == r.x_right) return r.x_left;  // collapsed bracket
            return weight_section_point(r.x_left, r.x_right, r.fhat_left, r.fhat_right);
        case SectionRule::OracleGamma:
            if (r.x_left == r.x_right) return r.x_left;
            return higher_order_point(r.x_left, r.x_right, r.fhat_left, r.fhat_right, gamma);
    }
    throw std::logic_error("section_point: unknown rule");
}

struct UpdateStatus {
    bool completed = false;       // false: budget ran out before the stage finished
    long long samples_used = 0;
};

// One full stage transition: query at the rule's point until the boundary is
// crossed, refresh the opposite endpoint by sharp re-sampling, then either
// shrink the bracket (sign confirmed) or roll back (sign contradicted).
// Appends the next StageRecord on completion. At t = 1 the stored opposite
// estimate is the +-1 placeholder, so the sign check is skipped: a single
// contradicting draw there would collapse the bracket to a point for the
// whole run, which is far worse than deferring the check one stage.
inline UpdateStatus update(std::vector<StageRecord>& history, SectionRule rule,
                           SamplingOracle& oracle, const SprbConfig& cfg,
                           std::optional<long long> remaining_budget = std::nullopt,
                           RunningStats* pooled_stats = nullptr) {
    if (history.empty()) throw std::invalid_argument("update: empty history");
    StageRecord cur = history.back();
    if (!(cur.fhat_left < 0.0 && cur.fhat_right > 0.0))
        throw std::runtime_error("update: sign invariant broken");
    const int t = cur.stage_index;

    const double x_next = section_point(rule, cur, cfg.gamma);
    history.back().x_next = x_next;

    BoundaryConfig bc = cfg.boundary;
    bc.alpha = sprb_alpha(cfg);
    const auto outcome = stage_sampling(oracle, x_next, t, bc, remaining_budget, pooled_stats);
    UpdateStatus status{false, outcome.n_samples};
    if (outcome.terminated_by == StopCause::BudgetExhausted) return status;
    const double fhat = outcome.mean;

    const long long n_sharp = sharp_sample_count(t, outcome.n_samples);
    if (remaining_budget && status.samples_used + n_sharp > *remaining_budget) return status;
    const double opp_x = fhat > 0.0 ? cur.x_left : cur.x_right;
    double sharp_sum = 0.0;
    for (long long i = 0; i < n_sharp; ++i) {
        const double y = oracle.sample_one(opp_x);
        if (pooled_stats) pooled_stats->add(y);
        sharp_sum += y;
    }
    const double f_sharp = sharp_sum / double(n_sharp);
    status.samples_used += n_sharp;

    StageRecord next;
    next.stage_index = t + 1;
    if (fhat > 0.0) {
        const bool sign_ok = f_sharp <= 0.0;  // f_sharp == 0 treated as agreeing
        if (sign_ok || t == 1) {
            next.x_left = cur.x_left;
            next.x_right = x_next;
            next.fhat_right = fhat;
            next.n_right = outcome.n_samples;
            if (sign_ok) {
                next.fhat_left = (double(cur.n_left) * cur.fhat_left + double(n_sharp) * f_sharp) /
                                 double(cur.n_left + n_sharp);
                next.n_left = n_sharp;
            } else {  // t == 1 and the single sharp draw disagrees: keep the placeholder
                next.fhat_left = cur.fhat_left;
                next.n_left = cur.n_left;
            }
        } else {
            const StageRecord& prev = history[history.size() - 2];
            next.x_left = prev.x_left;
            next.fhat_left = prev.fhat_left;
            next.n_left = prev.n_left;
            next.x_right = cur.x_left;
            next.fhat_right = f_sharp;
            next.n_right = n_sharp;
        }
    } else {
        const bool sign_ok = f_sharp >= 0.0;
        if (sign_ok || t == 1) {
            next.x_right = cur.x_right;
            next.x_left = x_next;
            next.fhat_left = fhat;
            next.n_left = outcome.n_samples;
            if (sign_ok) {
                next.fhat_right = (double(cur.n_right) * cur.fhat_right + double(n_sharp) * f_sharp) /
                                  double(cur.n_right + n_sharp);
                next.n_right = n_sharp;
            } else {
                next.fhat_right = cur.fhat_right;
                next.n_right = cur.n_right;
            }
        } else {
            const StageRecord& prev = history[history.size() - 2];
            next.x_right = prev.x_right;
            next.fhat_right = prev.fhat_right;
            next.n_right = prev.n_right;
            next.x_left = cur.x_right;
            next.fhat_left = f_sharp;
            next.n_left = n_sharp;
        }
    }
    history.push_back(next);
    status.completed = true;
    return status;
}

// Stage indices t1 = 1, t_{n+1} = t_n + ceil(ln(t_n + 1)), truncated at k_max.
inline std::vector<long long> grid_schedule(long long k_max) {
    if (k_max < 1) throw std::invalid_argument("grid_schedule: k_max must be >= 1");
    std::vector<long long> grid;
    long long t = 1;
    while (t <= k_max) {
        grid.push_back(t);
        const long long step = (long long)std::ceil(std::log(double(t) + 1.0));
        t += step < 1 ? 1 : step;
    }
    return grid;
}

enum class RunTermination { StagesDone, BudgetExhausted };

struct SprbResult {
    double estimate = 0.0;
    ConfidenceSequence confidence_sequence;
    std::vector<StageRecord> stage_records;
    long long total_samples = 0;
    int stages_completed = 0;
    RunTermination terminated_by = RunTermination::StagesDone;
};

inline SectionRule choose_rule(const SprbConfig& cfg, int t, double width,
                               const std::vector<long long>& grid) {
    const double ws = effective_width_switch(cfg);
    switch (cfg.variant) {
        case SprbVariant::Basic:
            return width > ws ? SectionRule::Bisection : SectionRule::WeightSection;
        case SprbVariant::Full: {
            bool on_grid = false;
            for (long long g : grid) {
                if (g == t) { on_grid = true; break; }
                if (g > t) break;
            }
            return (on_grid || width > ws) ? SectionRule::Bisection : SectionRule::WeightSection;
        }
        case SprbVariant::OracleGamma:
            return width > ws ? SectionRule::Bisection : SectionRule::OracleGamma;
    }
    throw std::logic_error("choose_rule: unknown variant");
}

// Runs max_stages rule applications. Stages 1..max_stages-1 sample at their
// query point and shrink/roll back the bracket; the final stage only computes
// its query point, which is the returned estimate X_{k+1}.
inline SprbResult run_sprb(const SprbConfig& cfg, SamplingOracle& oracle) {
    validate_config(cfg);
    std::vector<long long> grid;
    if (cfg.variant == SprbVariant::Full) grid = grid_schedule(cfg.max_stages);

    std::vector<StageRecord> history;
    StageRecord init;
    init.x_left = cfg.interval_lo;
    init.x_right = cfg.interval_hi;
    init.fhat_left = -1.0;
    init.fhat_right = 1.0;
    init.n_left = 1;
    init.n_right = 1;
    init.stage_index = 1;
    history.push_back(init);

    RunningStats pooled;
    RunningStats* pooled_ptr = cfg.boundary.sigma_known ? nullptr : &pooled;

    SprbResult res;
    res.estimate = bisection_point(cfg.interval_lo, cfg.interval_hi);
    for (int t = 1; t <= cfg.max_stages; ++t) {
        const StageRecord& cur = history.back();
        const double width = cur.x_right - cur.x_left;
        const SectionRule rule = choose_rule(cfg, t, width, grid);
        if (t == cfg.max_stages) {
            const double x_next = section_point(rule, cur, cfg.gamma);
            history.back().x_next = x_next;
            res.estimate = x_next;
            res.stages_completed = t;
            break;
        }
        std::optional<long long> remaining;
        if (cfg.sample_budget) {
            remaining = *cfg.sample_budget - res.total_samples;
            if (*remaining <= 0) {
                // no samples left: the rule's point still costs nothing
                const double x_next = section_point(rule, cur, cfg.gamma);
                history.back().x_next = x_next;
                res.estimate = x_next;
                res.stages_completed = t;
                res.terminated_by = RunTermination::BudgetExhausted;
                break;
            }
        }
        const UpdateStatus st = update(history, rule, oracle, cfg, remaining, pooled_ptr);
        res.total_samples += st.samples_used;
        res.estimate = history[history.size() - (st.completed ? 2 : 1)].x_next;
        res.stages_completed = t;
        if (!st.completed) {
            res.terminated_by = RunTermination::BudgetExhausted;
            break;
        }
    }

    res.stage_records = history;
    res.confidence_sequence.delta_tol = cfg.delta_tol;
    for (const auto& r : history) {
        res.confidence_sequence.entries.push_back({r.stage_index, r.x_left, r.x_right});
    }
    return res;
}

} // namespace sprb
