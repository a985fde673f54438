#pragma once
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sprb/model.hpp"

namespace sprb {

enum class RmMode { FixedAlpha, Oracle, Adaptive };

struct RmConfig {
    double alpha = 1.0;          // step constant (FixedAlpha) or 1/f'(theta) (Oracle)
    double clip_lo = 0.0;
    double clip_hi = 1.0;
    RmMode mode = RmMode::FixedAlpha;
};

struct Trajectory {
    std::vector<std::pair<long long, double>> iterates;  // (sample_index, x)
    double final_estimate = 0.0;
    long long samples_used = 0;
};

inline double clip_to(double x, double lo, double hi) {
    return std::min(std::max(x, lo), hi);
}

// Robbins-Monro recursion X_{i+1} = clip(X_i - (alpha/i) Y_i), one oracle
// draw per step. record_stride thins the stored trajectory (the initial and
// final iterates are always kept); estimates are unaffected.
inline Trajectory rm_run(SamplingOracle& oracle, const RmConfig& cfg, long long n, double x1,
                         long long record_stride = 1) {
    if (!(cfg.alpha > 0.0)) throw std::invalid_argument("rm_run: alpha must be > 0");
    if (!(cfg.clip_lo < cfg.clip_hi)) throw std::invalid_argument("rm_run: empty clip interval");
    if (n < 1) throw std::invalid_argument("rm_run: n must be >= 1");
    if (record_stride < 1) throw std::invalid_argument("rm_run: record_stride must be >= 1");
    if (x1 < cfg.clip_lo || x1 > cfg.clip_hi)
        throw std::invalid_argument("rm_run: x1 outside clip interval");

    Trajectory traj;
    traj.iterates.reserve(size_t(std::min(n / record_stride + 2, 1000000LL)));
    double x = x1;
    traj.iterates.emplace_back(0, x);
    for (long long i = 1; i <= n; ++i) {
        const double y = oracle.sample_one(x);
        x = clip_to(x - (cfg.alpha / double(i)) * y, cfg.clip_lo, cfg.clip_hi);
        if (i % record_stride == 0 || i == n) traj.iterates.emplace_back(i, x);
    }
    traj.final_estimate = x;
    traj.samples_used = n;
    return traj;
}

// RM with the asymptotically optimal step alpha = 1/f'(theta).
inline Trajectory oracle_rm_run(SamplingOracle& oracle, double fprime_theta, long long n,
                                double x1, double clip_lo = 0.0, double clip_hi = 1.0,
                                long long record_stride = 1) {
    if (!(fprime_theta > 0.0))
        throw std::invalid_argument("oracle_rm_run: fprime_theta must be > 0");
    RmConfig cfg;
    cfg.alpha = 1.0 / fprime_theta;
    cfg.clip_lo = clip_lo;
    cfg.clip_hi = clip_hi;
    cfg.mode = RmMode::Oracle;
    return rm_run(oracle, cfg, n, x1, record_stride);
}

// Running sufficient statistics for the OLS slope of y on x.
class SlopeAccumulator {
public:
    void add(double x, double y) {
        ++n_;
        const double dx = x - mean_x_;
        mean_x_ += dx / double(n_);
        const double dy = y - mean_y_;
        mean_y_ += dy / double(n_);
        sxx_ += dx * (x - mean_x_);
        sxy_ += dx * (y - mean_y_);
    }

    long long count() const { return n_; }
    bool degenerate() const { return n_ < 2 || sxx_ <= 0.0; }

    double slope() const {
        if (degenerate()) throw std::runtime_error("SlopeAccumulator: degenerate design");
        return sxy_ / sxx_;
    }

private:
    long long n_ = 0;
    double mean_x_ = 0.0, mean_y_ = 0.0;
    double sxx_ = 0.0, sxy_ = 0.0;
};

inline double ls_slope(const std::vector<std::pair<double, double>>& points) {
    SlopeAccumulator acc;
    for (const auto& [x, y] : points) acc.add(x, y);
    return acc.slope();
}

// Adaptive stochastic approximation: RM with step phi_i / i, where
// phi_i = 1 / (b_i v (slope_i ^ B_i)), slope_i the running OLS estimate over
// all past (X_j, Y_j). Truncation b_i = 1/ln(i+2), B_i = ln(i+2); phi = 1
// while the slope is unavailable (fewer than 2 points or degenerate design).
inline Trajectory asa_run(SamplingOracle& oracle, const RmConfig& cfg, long long n, double x1,
                          long long record_stride = 1) {
    if (!(cfg.clip_lo < cfg.clip_hi)) throw std::invalid_argument("asa_run: empty clip interval");
    if (n < 2) throw std::invalid_argument("asa_run: n must be >= 2");
    if (record_stride < 1) throw std::invalid_argument("asa_run: record_stride must be >= 1");
    if (x1 < cfg.clip_lo || x1 > cfg.clip_hi)
        throw std::invalid_argument("asa_run: x1 outside clip interval");

    Trajectory traj;
    traj.iterates.reserve(size_t(std::min(n / record_stride + 2, 1000000LL)));
    SlopeAccumulator acc;
    double x = x1;
    traj.iterates.emplace_back(0, x);
    for (long long i = 1; i <= n; ++i) {
        const double y = oracle.sample_one(x);
        acc.add(x, y);
        const double b_i = 1.0 / std::log(double(i) + 2.0);
        const double B_i = std::log(double(i) + 2.0);
        double bhat = 1.0;
        if (!acc.degenerate()) bhat = std::max(b_i, std::min(acc.slope(), B_i));
        const double phi = 1.0 / bhat;
        x = clip_to(x - (phi / double(i)) * y, cfg.clip_lo, cfg.clip_hi);
        if (i % record_stride == 0 || i == n) traj.iterates.emplace_back(i, x);
    }
    traj.final_estimate = x;
    traj.samples_used = n;
    return traj;
}

} // namespace sprb
