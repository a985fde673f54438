#pragma once
#include <cmath>
#include <stdexcept>

namespace sprb {

// Jump-rate constant kappa = 1 - max(mu_minus, mu_plus)/(mu_plus + mu_minus),
// always in (0, 1/2]; equals 1/2 iff the jump is symmetric.
inline double kappa(double mu_minus, double mu_plus) {
    if (!(mu_minus > 0.0) || !(mu_plus > 0.0))
        throw std::domain_error("kappa: jump magnitudes must be > 0");
    return 1.0 - std::max(mu_minus, mu_plus) / (mu_plus + mu_minus);
}

enum class RateRegime { Smooth, Jump, HigherOrder };

// Predicted error-scale curves, constants normalized to 1; meaningful for
// log-log slope diagnostics, not absolute levels.
struct RatePrediction {
    RateRegime regime = RateRegime::Smooth;
    double gamma = 1.0;        // HigherOrder exponent
    double delta_slack = 0.0;  // HigherOrder slack in the exponent
    double kappa_value = 0.5;  // Jump constant
    double eta = 1.5;          // Jump polylog exponent, > 1

    static RatePrediction smooth() { return {}; }

    static RatePrediction higher_order(double gamma, double delta_slack = 0.0) {
        if (!(gamma >= 1.0)) throw std::domain_error("higher_order: gamma must be >= 1");
        RatePrediction p;
        p.regime = RateRegime::HigherOrder;
        p.gamma = gamma;
        p.delta_slack = delta_slack;
        return p;
    }

    static RatePrediction jump(double mu_minus, double mu_plus, double eta = 1.5) {
        if (!(eta > 1.0)) throw std::domain_error("jump: eta must be > 1");
        RatePrediction p;
        p.regime = RateRegime::Jump;
        p.kappa_value = kappa(mu_minus, mu_plus);
        p.eta = eta;
        return p;
    }
};

inline double predicted_error(const RatePrediction& pred, long long n, double sigma) {
    if (n < 2) throw std::domain_error("predicted_error: n must be >= 2");
    const double nd = double(n);
    switch (pred.regime) {
        case RateRegime::Smooth:
            return std::pow(nd, -0.5);
        case RateRegime::HigherOrder:
            return std::pow(nd, -1.0 / (2.0 * pred.gamma) + pred.delta_slack);
        case RateRegime::Jump:
            return std::exp(-pred.kappa_value * std::sqrt(nd) /
                            (sigma * std::pow(std::log(nd), pred.eta)));
    }
    throw std::logic_error("predicted_error: unknown regime");
}

} // namespace sprb
