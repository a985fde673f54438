#pragma once
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>

#include "sprb/model.hpp"

namespace sprb {

// Welford accumulator for a running mean / sample standard deviation.
class RunningStats {
public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / double(n_);
        m2_ += d * (x - mean_);
    }

    long long count() const { return n_; }
    double mean() const { return mean_; }

    double variance() const {
        if (n_ < 2) throw std::runtime_error("RunningStats: need >= 2 observations");
        return m2_ / double(n_ - 1);
    }

    double stddev() const { return std::sqrt(variance()); }

private:
    long long n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

inline double estimate_sigma(const RunningStats& stats) { return stats.stddev(); }

// Moving boundary T(j, alpha_t) = sigma * sqrt(-2 j ln(j+1) ln(alpha_t)).
// Natural logarithms throughout.
inline double boundary_T(long long j, double alpha_t, double sigma) {
    if (j < 1) throw std::domain_error("boundary_T: j must be >= 1");
    if (!(alpha_t > 0.0 && alpha_t < 1.0))
        throw std::domain_error("boundary_T: alpha_t must be in (0,1)");
    if (!(sigma > 0.0)) throw std::domain_error("boundary_T: sigma must be > 0");
    return sigma * std::sqrt(-2.0 * double(j) * std::log(double(j) + 1.0) * std::log(alpha_t));
}

// Stage-level error budget alpha_t = alpha * 2^{-t}.
inline double stage_alpha(double alpha, int t) {
    if (t < 1) throw std::domain_error("stage_alpha: t must be >= 1");
    return std::ldexp(alpha, -t);
}

struct BoundaryConfig {
    double sigma = 1.0;
    double alpha = 0.05;
    bool sigma_known = true;
};

enum class StopCause { BoundaryCrossed, BudgetExhausted };

struct StoppingOutcome {
    long long n_samples = 0;       // stopping time N
    double sum = 0.0;              // stopped sum S_N
    double mean = 0.0;             // stopped average M = S_N / N
    StopCause terminated_by = StopCause::BoundaryCrossed;
};

// One stage of repeated querying at a fixed location: draw one response at
// a time until |S_j| exceeds T(j, alpha_t), or the budget runs out.
//
// When cfg.sigma_known is false the boundary uses the running empirical
// sigma, floored at 1e-6, pooled into `pooled_stats` if supplied (the noise
// is homoskedastic, so pooling across locations is valid); no crossing is
// declared before two observations exist.
inline StoppingOutcome stage_sampling(SamplingOracle& oracle, double x, int t,
                                      const BoundaryConfig& cfg,
                                      std::optional<long long> remaining_budget = std::nullopt,
                                      RunningStats* pooled_stats = nullptr) {
    if (t < 1) throw std::domain_error("stage_sampling: t must be >= 1");
    if (remaining_budget && *remaining_budget < 1)
        throw std::invalid_argument("stage_sampling: remaining_budget must be >= 1");

    const double alpha_t = stage_alpha(cfg.alpha, t);
    if (!(alpha_t > 0.0 && alpha_t < 1.0))
        throw std::domain_error("stage_sampling: stage alpha outside (0,1)");
    const double neg2_log_alpha = -2.0 * std::log(alpha_t);

    RunningStats local;
    RunningStats* stats = pooled_stats ? pooled_stats : &local;

    double s = 0.0;
    long long j = 0;
    for (;;) {
        const double y = oracle.sample_one(x);
        ++j;
        s += y;
        if (!cfg.sigma_known) stats->add(y);

        double sigma = cfg.sigma;
        bool can_test = true;
        if (!cfg.sigma_known) {
            if (stats->count() < 2) can_test = false;
            else sigma = std::max(estimate_sigma(*stats), 1e-6);
        }
        if (can_test) {
            // cheap necessary condition first: ln(j+1) >= ln 2
            const double c = sigma * sigma * neg2_log_alpha * double(j);
            if (s * s > c * 0.6931471805599453 &&
                s * s > c * std::log(double(j) + 1.0)) {
                return {j, s, s / double(j), StopCause::BoundaryCrossed};
            }
        }
        if (remaining_budget && j >= *remaining_budget) {
            return {j, s, s / double(j), StopCause::BudgetExhausted};
        }
    }
}

// delta(mu, alpha_t) = -2 sigma^2 ln(alpha_t) / mu^2.
inline double delta_stat(double mu, double alpha_t, double sigma) {
    if (mu == 0.0) throw std::domain_error("delta_stat: mu must be nonzero");
    return -2.0 * sigma * sigma * std::log(alpha_t) / (mu * mu);
}

// Leading-order expected stopping time delta * ln(delta + 1).
inline double expected_N_theory(double mu, double alpha_t, double sigma) {
    const double d = delta_stat(mu, alpha_t, sigma);
    return d * std::log(d + 1.0);
}

// Solves sqrt(delta / ln(delta+1)) = sigma sqrt(-2 ln alpha_k) / |mu| for
// delta > 1. g(delta) = delta / ln(delta+1) is strictly increasing there,
// so a bracketed bisection suffices.
inline double solve_N_prime(double mu, double alpha_k, double sigma) {
    if (mu == 0.0) throw std::domain_error("solve_N_prime: mu must be nonzero");
    const double c = sigma * std::sqrt(-2.0 * std::log(alpha_k)) / std::fabs(mu);
    const double c2 = c * c;
    const double g1 = 1.0 / std::log(2.0);
    if (!(c2 > g1))
        throw std::domain_error("solve_N_prime: no solution with delta > 1");

    double lo = 1.0, hi = 2.0;
    auto g = [](double d) { return d / std::log(d + 1.0); };
    while (g(hi) < c2) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) throw std::runtime_error("solve_N_prime: bracket overflow");
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) < c2) lo = mid;
        else hi = mid;
        if (hi - lo <= 1e-13 * hi) break;
    }
    return 0.5 * (lo + hi);
}

} // namespace sprb
