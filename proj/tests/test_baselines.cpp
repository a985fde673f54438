#include <doctest.h>

#include <cmath>

#include "sprb/baselines.hpp"

using namespace sprb;

namespace {

RegressionProblem linear_problem(double beta, double theta, double sigma) {
    RegressionProblem p;
    p.f = RegressionFunction::linear(beta, theta);
    p.noise = NoiseModel{NoiseKind::Gaussian, sigma};
    return p;
}

} // namespace

TEST_CASE("rm takes the textbook step") {
    auto p = linear_problem(1.0, 0.3, 0.0);
    SamplingOracle oracle(p, Rng(1));
    RmConfig cfg;
    const auto traj = rm_run(oracle, cfg, 1, 0.5);
    CHECK(traj.final_estimate == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(traj.samples_used == 1);
    CHECK(traj.iterates.size() == 2);
    CHECK(traj.iterates[0].second == doctest::Approx(0.5));
}

TEST_CASE("rm rejects a zero step constant") {
    auto p = linear_problem(1.0, 0.3, 0.0);
    SamplingOracle oracle(p, Rng(1));
    RmConfig cfg;
    cfg.alpha = 0.0;
    CHECK_THROWS_AS(rm_run(oracle, cfg, 1, 0.5), std::invalid_argument);
}

TEST_CASE("rm is a fixed point at the root without noise") {
    auto p = linear_problem(2.0, 0.3, 0.0);
    SamplingOracle oracle(p, Rng(1));
    RmConfig cfg;
    const auto traj = rm_run(oracle, cfg, 50, 0.3);
    for (const auto& [i, x] : traj.iterates) CHECK(x == doctest::Approx(0.3));
}

TEST_CASE("oracle rm converges in one noiseless step for any slope") {
    auto p = linear_problem(2.0, 0.3, 0.0);
    SamplingOracle oracle(p, Rng(1));
    const auto traj = oracle_rm_run(oracle, 2.0, 1, 0.5);
    CHECK(traj.final_estimate == doctest::Approx(0.3).epsilon(1e-14));
}

TEST_CASE("oracle rm equals rm with the reciprocal step") {
    auto p = linear_problem(1.5, 0.3, 1.0);
    SamplingOracle o1(p, Rng(9));
    SamplingOracle o2(p, Rng(9));
    RmConfig cfg;
    cfg.alpha = 1.0 / 1.5;
    const auto a = rm_run(o1, cfg, 200, 0.5);
    const auto b = oracle_rm_run(o2, 1.5, 200, 0.5);
    REQUIRE(a.iterates.size() == b.iterates.size());
    for (size_t i = 0; i < a.iterates.size(); ++i) {
        CHECK(a.iterates[i].second == doctest::Approx(b.iterates[i].second).epsilon(1e-14));
    }
}

TEST_CASE("trajectories stay inside the clip interval") {
    auto p = linear_problem(1.0, 0.3, 5.0);  // large noise forces clipping
    SamplingOracle oracle(p, Rng(4));
    RmConfig cfg;
    cfg.alpha = 3.0;
    const auto traj = rm_run(oracle, cfg, 500, 0.5);
    for (const auto& [i, x] : traj.iterates) {
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
    }
    SamplingOracle o2(p, Rng(4));
    const auto asa = asa_run(o2, cfg, 500, 0.5);
    for (const auto& [i, x] : asa.iterates) {
        CHECK(x >= 0.0);
        CHECK(x <= 1.0);
    }
}

TEST_CASE("sample accounting matches the oracle ledger") {
    auto p = linear_problem(1.0, 0.3, 1.0);
    SamplingOracle oracle(p, Rng(5));
    RmConfig cfg;
    const auto a = rm_run(oracle, cfg, 123, 0.5);
    CHECK(a.samples_used == 123);
    CHECK(oracle.query_count() == 123);
    const auto b = asa_run(oracle, cfg, 77, 0.5);
    CHECK(b.samples_used == 77);
    CHECK(oracle.query_count() == 200);
}

TEST_CASE("record stride thins the stored iterates only") {
    auto p = linear_problem(1.0, 0.3, 1.0);
    SamplingOracle o1(p, Rng(6));
    SamplingOracle o2(p, Rng(6));
    RmConfig cfg;
    const auto full = rm_run(o1, cfg, 100, 0.5, 1);
    const auto thin = rm_run(o2, cfg, 100, 0.5, 100);
    CHECK(full.iterates.size() == 101);
    CHECK(thin.iterates.size() == 2);
    CHECK(thin.final_estimate == doctest::Approx(full.final_estimate).epsilon(1e-15));
}

TEST_CASE("ls_slope matches hand-computed fits") {
    CHECK(ls_slope({{0.0, 0.0}, {1.0, 2.0}}) == doctest::Approx(2.0));
    CHECK(ls_slope({{0.0, 1.0}, {1.0, 1.0}, {2.0, 1.0}}) == doctest::Approx(0.0));
    CHECK(ls_slope({{0.0, 0.0}, {1.0, 1.0}, {2.0, 4.0}}) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(ls_slope({{1.0, 1.0}}), std::runtime_error);
    CHECK_THROWS_AS(ls_slope({{1.0, 1.0}, {1.0, 2.0}}), std::runtime_error);
}

TEST_CASE("asa truncation keeps the slope surrogate in [b_n, B_n]") {
    // steep slope: the estimate exceeds B_i early on, so steps must match the
    // upper-truncated value; shallow slope hits the lower clamp
    {
        auto p = linear_problem(100.0, 0.3, 0.0);
        SamplingOracle oracle(p, Rng(2));
        RmConfig cfg;
        auto traj = asa_run(oracle, cfg, 3, 0.5);
        // i=1: phi=1 (no slope yet): x2 = 0.5 - 20 -> clipped to 0
        CHECK(traj.iterates[1].second == doctest::Approx(0.0));
        // i=2 at x=0: y=-30, slope over {(0.5,20),(0,-30)} = 100 > B_2=ln(4)
        // -> phi = 1/ln(4): x3 = 0 + 30/(2 ln 4)-> clipped to 1
        CHECK(traj.iterates[2].second == doctest::Approx(1.0));
    }
    {
        auto p = linear_problem(0.001, 0.3, 0.0);  // slope below b_i
        SamplingOracle oracle(p, Rng(2));
        RmConfig cfg;
        auto traj = asa_run(oracle, cfg, 3, 0.5);
        // i=2 at x2: slope estimate 0.001 < b_2 = 1/ln(4) -> phi = ln(4)
        const double x2 = traj.iterates[1].second;
        const double y2 = 0.001 * (x2 - 0.3);
        const double expected = x2 - (std::log(4.0) / 2.0) * y2;
        CHECK(traj.iterates[2].second == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("asa falls back to unit steps on a degenerate design") {
    // zero noise starting at the root: every iterate stays at theta and the
    // design never gains dispersion, so phi stays 1 and nothing moves
    auto p = linear_problem(1.0, 0.3, 0.0);
    SamplingOracle oracle(p, Rng(3));
    RmConfig cfg;
    const auto traj = asa_run(oracle, cfg, 20, 0.3);
    for (const auto& [i, x] : traj.iterates) CHECK(x == doctest::Approx(0.3));
}
