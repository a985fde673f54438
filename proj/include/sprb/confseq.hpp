#pragma once
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace sprb {

// The stage intervals I_t = [x_left, x_right], valid simultaneously over all
// stages with total error probability <= delta_tol.
struct ConfidenceSequence {
    struct Entry {
        int stage = 0;
        double x_left = 0.0;
        double x_right = 0.0;
    };
    std::vector<Entry> entries;
    double delta_tol = 0.0;
};

// Smallest stage whose interval excludes theta, or nullopt if every interval
// contains it.
inline std::optional<int> first_violation(const ConfidenceSequence& cs, double theta) {
    for (const auto& e : cs.entries) {
        if (theta < e.x_left || theta > e.x_right) return e.stage;
    }
    return std::nullopt;
}

// Wilson score upper bound for a binomial proportion at the given z quantile
// (default: the 95% two-sided quantile, i.e. a conservative upper limit).
inline double wilson_upper_bound(long long successes, long long trials, double z = 1.9599639845400545) {
    if (trials < 1) throw std::invalid_argument("wilson_upper_bound: trials must be >= 1");
    const double n = double(trials);
    const double p = double(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = p + z2 / (2.0 * n);
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    return (center + half) / denom;
}

struct CoverageReport {
    long long violations = 0;
    long long reps = 0;
    double violation_rate = 0.0;
    double wilson_upper = 0.0;
    std::vector<double> mean_width_by_stage;  // index t-1 -> mean width of I_t
};

} // namespace sprb
