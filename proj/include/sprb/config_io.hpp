#pragma once
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "sprb/harness.hpp"

namespace sprb {

inline Family parse_family(const std::string& s) {
    if (s == "linear") return Family::Linear;
    if (s == "power_sign") return Family::PowerSign;
    if (s == "jump") return Family::Jump;
    throw std::invalid_argument("unknown family: " + s);
}

inline NoiseKind parse_noise(const std::string& s) {
    if (s == "gaussian") return NoiseKind::Gaussian;
    if (s == "uniform") return NoiseKind::UniformCentered;
    if (s == "rademacher") return NoiseKind::Rademacher;
    throw std::invalid_argument("unknown noise kind: " + s);
}

inline RegressionFunction make_regression(Family family, double beta, double gamma,
                                          double theta, double mu_minus, double mu_plus) {
    switch (family) {
        case Family::Linear: return RegressionFunction::linear(beta, theta);
        case Family::PowerSign: return RegressionFunction::power_sign(beta, gamma, theta);
        case Family::Jump: return RegressionFunction::jump(mu_minus, mu_plus, theta);
    }
    throw std::logic_error("make_regression: unknown family");
}

// Loads an ExperimentConfig from a JSON object whose keys mirror the struct's
// field names; absent keys keep their defaults.
inline ExperimentConfig experiment_config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    const Family family = parse_family(j.value("family", std::string("linear")));
    cfg.problem.f = make_regression(family, j.value("beta", 1.0), j.value("gamma", 1.0),
                                    j.value("theta", 0.3), j.value("mu_minus", 1.0),
                                    j.value("mu_plus", 1.0));
    cfg.problem.noise.kind = parse_noise(j.value("noise", std::string("gaussian")));
    cfg.problem.noise.sigma = j.value("sigma", 1.0);
    cfg.problem.interval_lo = j.value("interval_lo", 0.0);
    cfg.problem.interval_hi = j.value("interval_hi", 1.0);
    if (j.contains("algorithms")) {
        cfg.algorithms.clear();
        for (const auto& a : j.at("algorithms")) {
            const auto parsed = parse_algorithm(a.get<std::string>());
            if (!parsed) throw std::invalid_argument("unknown algorithm: " + a.get<std::string>());
            cfg.algorithms.push_back(*parsed);
        }
    }
    cfg.reps = j.value("reps", cfg.reps);
    cfg.max_stages = j.value("max_stages", cfg.max_stages);
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.delta_tol = j.value("delta_tol", cfg.delta_tol);
    cfg.x1 = j.value("x1", cfg.x1);
    cfg.output_path = j.value("output_path", cfg.output_path);
    cfg.width_switch = j.value("width_switch", cfg.width_switch);
    if (j.contains("sample_budget") && !j.at("sample_budget").is_null())
        cfg.sample_budget = j.at("sample_budget").get<long long>();
    cfg.oracle_gamma = j.value("oracle_gamma", cfg.oracle_gamma);
    cfg.rm_alpha = j.value("rm_alpha", cfg.rm_alpha);
    return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;
    return experiment_config_from_json(j);
}

} // namespace sprb
