#pragma once
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sprb/rng.hpp"

namespace sprb {

// Regression function families used in the simulation oracle. All satisfy
// the zero-crossing condition (x - theta) * f(x) > 0 for x != theta.
enum class Family { Linear, PowerSign, Jump };

struct RegressionFunction {
    Family family = Family::Linear;
    double theta = 0.0;
    double beta = 1.0;      // slope (Linear) or scale (PowerSign)
    double gamma = 1.0;     // exponent (PowerSign only), >= 1
    double mu_minus = 1.0;  // left jump magnitude (Jump only), > 0
    double mu_plus = 1.0;   // right jump magnitude (Jump only), > 0

    static RegressionFunction linear(double beta, double theta) {
        if (!(beta > 0.0)) throw std::invalid_argument("linear: beta must be > 0");
        RegressionFunction f;
        f.family = Family::Linear;
        f.beta = beta;
        f.theta = theta;
        return f;
    }

    static RegressionFunction power_sign(double beta, double gamma, double theta) {
        if (!(beta > 0.0)) throw std::invalid_argument("power_sign: beta must be > 0");
        if (!(gamma >= 1.0)) throw std::invalid_argument("power_sign: gamma must be >= 1");
        RegressionFunction f;
        f.family = Family::PowerSign;
        f.beta = beta;
        f.gamma = gamma;
        f.theta = theta;
        return f;
    }

    static RegressionFunction jump(double mu_minus, double mu_plus, double theta) {
        if (!(mu_minus > 0.0) || !(mu_plus > 0.0))
            throw std::invalid_argument("jump: magnitudes must be > 0");
        RegressionFunction f;
        f.family = Family::Jump;
        f.mu_minus = mu_minus;
        f.mu_plus = mu_plus;
        f.theta = theta;
        return f;
    }
};

inline double eval_regression(const RegressionFunction& f, double x) {
    const double d = x - f.theta;
    switch (f.family) {
        case Family::Linear:
            return f.beta * d;
        case Family::PowerSign:
            if (d == 0.0) return 0.0;
            return (d > 0.0 ? 1.0 : -1.0) * f.beta * std::pow(std::fabs(d), f.gamma);
        case Family::Jump:
            // returns 0 exactly at the root; queries there have probability zero
            if (d < 0.0) return -f.mu_minus;
            if (d > 0.0) return f.mu_plus;
            return 0.0;
    }
    return 0.0;
}

enum class NoiseKind { Gaussian, UniformCentered, Rademacher };

// i.i.d. centered noise with variance sigma^2; every supported family is
// sub-Gaussian.
struct NoiseModel {
    NoiseKind kind = NoiseKind::Gaussian;
    double sigma = 1.0;

    double draw(Rng& rng) const {
        switch (kind) {
            case NoiseKind::Gaussian:
                return sigma * rng.next_normal();
            case NoiseKind::UniformCentered:
                // uniform on [-sqrt(3) sigma, sqrt(3) sigma]: variance sigma^2
                return 1.7320508075688772 * sigma * rng.next_uniform_sym();
            case NoiseKind::Rademacher:
                return rng.next_bit() ? sigma : -sigma;
        }
        return 0.0;
    }
};

struct RegressionProblem {
    RegressionFunction f;
    NoiseModel noise;
    double interval_lo = 0.0;
    double interval_hi = 1.0;
};

struct budget_exceeded_error : std::runtime_error {
    budget_exceeded_error()
        : std::runtime_error("sampling oracle: hard sample cap exceeded") {}
};

// Query-counting source of noisy responses f(x) + eps. The only channel
// through which algorithms see data. Single-owner, single-threaded; build
// one per replication via derive_rng.
class SamplingOracle {
public:
    SamplingOracle(RegressionProblem problem, Rng rng,
                   std::optional<long long> sample_cap = std::nullopt)
        : problem_(std::move(problem)), rng_(rng), sample_cap_(sample_cap) {}

    double sample_one(double x) {
        if (sample_cap_ && query_count_ + 1 > *sample_cap_) throw budget_exceeded_error{};
        ++query_count_;
        return eval_regression(problem_.f, x) + problem_.noise.draw(rng_);
    }

    std::vector<double> sample(double x, long long m) {
        if (m < 1) throw std::invalid_argument("sample: m must be >= 1");
        if (sample_cap_ && query_count_ + m > *sample_cap_) throw budget_exceeded_error{};
        std::vector<double> out;
        out.reserve(static_cast<size_t>(m));
        const double fx = eval_regression(problem_.f, x);
        for (long long i = 0; i < m; ++i) out.push_back(fx + problem_.noise.draw(rng_));
        query_count_ += m;
        return out;
    }

    // mean of m fresh draws at x, counted against the query ledger
    double sample_mean(double x, long long m) {
        if (m < 1) throw std::invalid_argument("sample_mean: m must be >= 1");
        if (sample_cap_ && query_count_ + m > *sample_cap_) throw budget_exceeded_error{};
        const double fx = eval_regression(problem_.f, x);
        double s = 0.0;
        for (long long i = 0; i < m; ++i) s += fx + problem_.noise.draw(rng_);
        query_count_ += m;
        return s / double(m);
    }

    long long query_count() const { return query_count_; }
    const RegressionProblem& problem() const { return problem_; }
    std::optional<long long> sample_cap() const { return sample_cap_; }

private:
    RegressionProblem problem_;
    Rng rng_;
    long long query_count_ = 0;
    std::optional<long long> sample_cap_;
};

} // namespace sprb
