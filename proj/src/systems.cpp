#include "chaosforge/systems.hpp"

#include <array>
#include <cmath>
#include <string>

#include "chaosforge/errors.hpp"
#include "chaosforge/rng.hpp"

namespace chaosforge {

namespace {

void check_finite(double x, double v, size_t step, const char* system) {
    if (!std::isfinite(x) || !std::isfinite(v))
        throw NumericError(std::string(system) + ": non-finite state at step " +
                           std::to_string(step));
}

}  // namespace

MultivariateSeries integrate_vdp(const VdpSpec& spec) {
    if (spec.dt <= 0.0 || spec.steps < 1) throw InputError("integrate_vdp: invalid spec");

    auto f = [&](double x, double v, double t, double& dx, double& dv) {
        dx = v;
        dv = spec.mu * (1.0 - x * x) * v - x + spec.a * std::cos(spec.omega * t);
    };

    MultivariateSeries s;
    s.channel_names = {"x", "v", "drive"};
    s.roles = {Role::observation, Role::observation, Role::action};
    s.values.assign(3, std::vector<double>(spec.steps));
    s.dt = spec.dt;

    double x = spec.x0, v = spec.v0;
    const double dt = spec.dt;
    for (size_t i = 0; i < spec.steps; ++i) {
        check_finite(x, v, i, "integrate_vdp");
        s.values[0][i] = x;
        s.values[1][i] = v;
        s.values[2][i] = spec.a * std::cos(spec.omega * dt * static_cast<double>(i));
        double t = dt * static_cast<double>(i);
        double k1x, k1v, k2x, k2v, k3x, k3v, k4x, k4v;
        f(x, v, t, k1x, k1v);
        f(x + 0.5 * dt * k1x, v + 0.5 * dt * k1v, t + 0.5 * dt, k2x, k2v);
        f(x + 0.5 * dt * k2x, v + 0.5 * dt * k2v, t + 0.5 * dt, k3x, k3v);
        f(x + dt * k3x, v + dt * k3v, t + dt, k4x, k4v);
        x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    return s;
}

MultivariateSeries integrate_lorenz(const LorenzSpec& spec) {
    if (spec.dt <= 0.0 || spec.steps < 1 || spec.stride < 1)
        throw InputError("integrate_lorenz: invalid spec");

    using State = std::array<double, 3>;
    auto f = [&](const State& u) {
        return State{spec.sigma * (u[1] - u[0]), u[0] * (spec.rho - u[2]) - u[1],
                     u[0] * u[1] - spec.beta * u[2]};
    };
    const double dt = spec.dt;
    auto rk4 = [&](const State& u) {
        State k1 = f(u);
        State k2 = f({u[0] + 0.5 * dt * k1[0], u[1] + 0.5 * dt * k1[1], u[2] + 0.5 * dt * k1[2]});
        State k3 = f({u[0] + 0.5 * dt * k2[0], u[1] + 0.5 * dt * k2[1], u[2] + 0.5 * dt * k2[2]});
        State k4 = f({u[0] + dt * k3[0], u[1] + dt * k3[1], u[2] + dt * k3[2]});
        return State{u[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
                     u[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
                     u[2] + dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])};
    };

    State u = {spec.x0, spec.y0, spec.z0};
    for (size_t i = 0; i < spec.transient; ++i) {
        if (!std::isfinite(u[0]) || !std::isfinite(u[1]) || !std::isfinite(u[2]))
            throw NumericError("integrate_lorenz: non-finite state at transient step " +
                               std::to_string(i));
        u = rk4(u);
    }

    MultivariateSeries s;
    s.channel_names = {"x", "y", "z"};
    s.roles = {Role::observation, Role::observation, Role::observation};
    s.values.assign(3, std::vector<double>(spec.steps));
    s.dt = spec.dt * static_cast<double>(spec.stride);
    for (size_t i = 0; i < spec.steps * spec.stride; ++i) {
        if (!std::isfinite(u[0]) || !std::isfinite(u[1]) || !std::isfinite(u[2]))
            throw NumericError("integrate_lorenz: non-finite state at step " + std::to_string(i));
        if (i % spec.stride == 0) {
            size_t j = i / spec.stride;
            s.values[0][j] = u[0];
            s.values[1][j] = u[1];
            s.values[2][j] = u[2];
        }
        u = rk4(u);
    }
    return s;
}

std::vector<double> logistic_map(double r, double x0, size_t steps) {
    if (x0 < 0.0 || x0 > 1.0) throw InputError("logistic_map: x0 must lie in [0, 1]");
    if (steps < 1) throw InputError("logistic_map: steps must be >= 1");
    std::vector<double> x(steps);
    double v = x0;
    for (size_t i = 0; i < steps; ++i) {
        x[i] = v;
        v = r * v * (1.0 - v);
    }
    return x;
}

MultivariateSeries vdp_run(double a, uint64_t seed, size_t steps, double mu, double omega,
                           double dt) {
    Rng rng = Rng(seed).fork("init");
    VdpSpec spec;
    spec.mu = mu;
    spec.a = a;
    spec.omega = omega;
    spec.dt = dt;
    spec.steps = steps;
    spec.x0 = 2.0 + 1e-2 * rng.gaussian();
    spec.v0 = 0.0 + 1e-2 * rng.gaussian();
    return integrate_vdp(spec);
}

std::vector<double> lorenz_x_strided(uint64_t seed, size_t n, size_t stride, size_t transient,
                                     double dt) {
    Rng rng = Rng(seed).fork("init");
    LorenzSpec spec;
    spec.x0 = 1.0 + 0.1 * rng.gaussian();
    spec.y0 = 1.0 + 0.1 * rng.gaussian();
    spec.z0 = 20.0 + 0.1 * rng.gaussian();
    spec.dt = dt;
    spec.steps = n;
    spec.stride = stride;
    spec.transient = transient;
    return integrate_lorenz(spec).values[0];
}

}  // namespace chaosforge
