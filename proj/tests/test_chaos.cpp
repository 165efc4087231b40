#include <cmath>
#include <vector>

#include "doctest.h"

#include "chaosforge/chaos.hpp"
#include "chaosforge/rng.hpp"
#include "chaosforge/systems.hpp"

using namespace chaosforge;

TEST_CASE("takens_embed lays out delayed coordinates") {
    std::vector<double> x{0, 1, 2, 3, 4, 5};
    TakensCloud c = takens_embed(x, 2, 3);
    REQUIRE(c.count == 2);
    REQUIRE(c.dim == 3);
    CHECK(c.delay == 2);
    CHECK(c.point(0)[0] == 0);
    CHECK(c.point(0)[1] == 2);
    CHECK(c.point(0)[2] == 4);
    CHECK(c.point(1)[0] == 1);
    CHECK(c.point(1)[2] == 5);
    CHECK_THROWS_AS(takens_embed(x, 0, 2), InputError);
    CHECK_THROWS_AS(takens_embed(x, 1, 0), InputError);
    CHECK_THROWS_AS(takens_embed(x, 3, 3), InputError);
}

TEST_CASE("dfa is near 0.5 on white noise and 1.5 on its cumulative sum") {
    for (uint64_t seed : {1ull, 2ull}) {
        Rng r(seed);
        std::vector<double> noise(4096);
        for (double& v : noise) v = r.gaussian();
        CHECK(std::fabs(dfa_exponent(noise) - 0.5) < 0.1);

        std::vector<double> walk(noise.size());
        double acc = 0.0;
        for (size_t i = 0; i < noise.size(); ++i) {
            acc += noise[i];
            walk[i] = acc;
        }
        CHECK(std::fabs(dfa_exponent(walk) - 1.5) < 0.15);
    }
}

TEST_CASE("dfa flags anti-correlated alternation as sub-0.5") {
    std::vector<double> x(512);
    for (size_t i = 0; i < x.size(); ++i) x[i] = (i % 2 == 0) ? 1.0 : -1.0;
    CHECK(dfa_exponent(x) < 0.3);
}

TEST_CASE("dfa input and numeric errors") {
    CHECK_THROWS_AS(dfa_exponent(std::vector<double>(63, 1.0)), InputError);
    CHECK_THROWS_AS(dfa_exponent(std::vector<double>(256, 3.7)), NumericError);
}

TEST_CASE("dfa is invariant to affine rescaling") {
    Rng r(9);
    std::vector<double> x(1024), y(1024);
    for (size_t i = 0; i < x.size(); ++i) {
        x[i] = r.gaussian();
        y[i] = -3.5 * x[i] + 100.0;
    }
    CHECK(dfa_exponent(y) == doctest::Approx(dfa_exponent(x)).epsilon(1e-6));
}

TEST_CASE("lyapunov of the logistic map at r=4 is near ln 2") {
    std::vector<double> x = logistic_map(4.0, 0.4, 4096);
    double lam = lyapunov_exponent(x);
    CHECK(std::fabs(lam - std::log(2.0)) < 0.1);
}

TEST_CASE("lyapunov of a damped oscillation is negative") {
    std::vector<double> x(2000);
    for (size_t i = 0; i < x.size(); ++i) {
        double t = static_cast<double>(i);
        x[i] = std::exp(-0.01 * t) * std::sin(0.3 * t);
    }
    CHECK(lyapunov_exponent(x) < 0.0);
}

TEST_CASE("lyapunov of strided lorenz x is near 0.9 per unit time") {
    // dt = 0.01, stride 10 -> lambda per sample = lambda per unit time / 10
    std::vector<double> x = lorenz_x_strided(1, 4096);
    double lam = lyapunov_exponent(x) * 10.0;
    CHECK(lam > 0.6);
    CHECK(lam < 1.2);
}

TEST_CASE("lyapunov divergence curve has the documented horizon") {
    Rng r(4);
    std::vector<double> x(1500);
    for (double& v : x) v = r.gaussian();
    DivergenceCurve c = lyapunov_divergence(x, 10, 1, 10);
    size_t M = x.size() - 9;
    CHECK(c.K == std::min<size_t>(50, M / 10));
    CHECK(c.mean_log_dist.size() == c.K + 1);
}

TEST_CASE("lyapunov floors exact repeats instead of minus infinity") {
    // a repeated motif puts some nearest neighbors at distance exactly zero;
    // the positive-distance floor keeps the log finite
    Rng r(12);
    std::vector<double> x(600);
    for (double& v : x) v = r.gaussian();
    for (size_t i = 0; i < 50; ++i) x[300 + i] = x[i];
    double lam = lyapunov_exponent(x);
    CHECK(std::isfinite(lam));

    // a fully periodic series has no positive pair distance at all
    std::vector<double> periodic(600);
    for (size_t i = 0; i < periodic.size(); ++i) periodic[i] = static_cast<double>(i % 7);
    CHECK_THROWS_AS(lyapunov_exponent(periodic), NumericError);
}

TEST_CASE("lyapunov rejects too-short and all-constant input") {
    CHECK_THROWS_AS(lyapunov_exponent(std::vector<double>(40, 0.0)), InputError);
    CHECK_THROWS_AS(lyapunov_exponent(std::vector<double>(600, 2.0)), NumericError);
}

TEST_CASE("lyapunov slope is invariant to affine rescaling") {
    std::vector<double> x = logistic_map(4.0, 0.37, 1500);
    std::vector<double> y(x.size());
    for (size_t i = 0; i < x.size(); ++i) y[i] = 7.0 * x[i] - 11.0;
    CHECK(lyapunov_exponent(y) == doctest::Approx(lyapunov_exponent(x)).epsilon(1e-6));
}

TEST_CASE("chaos_profile composes the metrics and enforces minimum length") {
    CHECK_THROWS_AS(chaos_profile(std::vector<double>(127, 1.0)), InputError);
    std::vector<double> x = logistic_map(4.0, 0.41, 512);
    ChaosProfile p = chaos_profile(x);
    CHECK(p.dfa == doctest::Approx(dfa_exponent(x)));
    CHECK(p.lyapunov == doctest::Approx(lyapunov_exponent(x)));
    CHECK(p.pe_h0 > 0.0);
    CHECK(p.pe_h1 >= 0.0);
}
