#include <cmath>
#include <vector>

#include "doctest.h"

#include "chaosforge/systems.hpp"

using namespace chaosforge;

TEST_CASE("vdp with mu=0 and no forcing is a harmonic oscillator") {
    VdpSpec spec;
    spec.mu = 0.0;
    spec.a = 0.0;
    spec.x0 = 1.0;
    spec.v0 = 0.0;
    spec.dt = 0.01;
    spec.steps = 700;
    MultivariateSeries s = integrate_vdp(spec);
    for (size_t i = 0; i < spec.steps; i += 50) {
        double t = spec.dt * static_cast<double>(i);
        CHECK(std::fabs(s.values[0][i] - std::cos(t)) < 1e-6);
        CHECK(std::fabs(s.values[1][i] + std::sin(t)) < 1e-6);
    }
}

TEST_CASE("vdp drive channel is the exact forcing signal") {
    VdpSpec spec;
    spec.a = 0.7;
    spec.steps = 100;
    MultivariateSeries s = integrate_vdp(spec);
    REQUIRE(s.channels() == 3);
    CHECK(s.channel_names[2] == "drive");
    CHECK(s.roles[2] == Role::action);
    for (size_t i = 0; i < spec.steps; ++i)
        CHECK(s.values[2][i] ==
              spec.a * std::cos(spec.omega * spec.dt * static_cast<double>(i)));
}

TEST_CASE("unforced vdp settles onto a bounded limit cycle") {
    VdpSpec spec;
    spec.steps = 4000;
    MultivariateSeries s = integrate_vdp(spec);
    double peak = 0.0;
    for (size_t i = 2000; i < spec.steps; ++i) peak = std::max(peak, std::fabs(s.values[0][i]));
    CHECK(peak > 1.5);
    CHECK(peak < 3.0);
}

TEST_CASE("lorenz stays on the attractor and respects stride bookkeeping") {
    LorenzSpec spec;
    spec.steps = 500;
    spec.stride = 10;
    spec.transient = 2000;
    MultivariateSeries s = integrate_lorenz(spec);
    CHECK(s.length() == 500);
    CHECK(s.dt == doctest::Approx(0.1));
    for (size_t i = 0; i < s.length(); ++i) {
        CHECK(std::fabs(s.values[0][i]) < 25.0);
        CHECK(s.values[2][i] > 0.0);
        CHECK(s.values[2][i] < 55.0);
    }
}

TEST_CASE("nearby lorenz trajectories separate") {
    LorenzSpec a, b;
    a.steps = b.steps = 2000;
    b.x0 += 1e-8;
    MultivariateSeries sa = integrate_lorenz(a);
    MultivariateSeries sb = integrate_lorenz(b);
    double d0 = std::fabs(sa.values[0][0] - sb.values[0][0]);
    double dend = 0.0;
    for (size_t i = 1900; i < 2000; ++i)
        dend = std::max(dend, std::fabs(sa.values[0][i] - sb.values[0][i]));
    CHECK(dend > 1e4 * std::max(d0, 1e-12));
}

TEST_CASE("logistic map follows the recurrence exactly") {
    std::vector<double> x = logistic_map(3.7, 0.2, 50);
    REQUIRE(x.size() == 50);
    CHECK(x[0] == 0.2);
    for (size_t i = 1; i < x.size(); ++i)
        CHECK(x[i] == 3.7 * x[i - 1] * (1.0 - x[i - 1]));
    CHECK_THROWS_AS(logistic_map(4.0, 1.5, 10), InputError);
    CHECK_THROWS_AS(logistic_map(4.0, 0.5, 0), InputError);
}

TEST_CASE("seeded runs are reproducible and seeds differ") {
    MultivariateSeries a = vdp_run(0.5, 9, 256);
    MultivariateSeries b = vdp_run(0.5, 9, 256);
    MultivariateSeries c = vdp_run(0.5, 10, 256);
    CHECK(a.values[0] == b.values[0]);
    CHECK(a.values[0] != c.values[0]);

    std::vector<double> la = lorenz_x_strided(4, 128, 10, 500);
    std::vector<double> lb = lorenz_x_strided(4, 128, 10, 500);
    CHECK(la == lb);
}

TEST_CASE("integrators reject bad specs") {
    VdpSpec v;
    v.dt = 0.0;
    CHECK_THROWS_AS(integrate_vdp(v), InputError);
    LorenzSpec l;
    l.stride = 0;
    CHECK_THROWS_AS(integrate_lorenz(l), InputError);
}
