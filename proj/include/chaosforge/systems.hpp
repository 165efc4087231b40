#pragma once
#include <cstdint>
#include <vector>

#include "chaosforge/series.hpp"

namespace chaosforge {

// forced Van der Pol: x'' - mu(1 - x^2)x' + x = a cos(omega t)
struct VdpSpec {
    double mu = 6.0;
    double a = 0.0;
    double omega = 1.788;
    double x0 = 2.0;
    double v0 = 0.0;
    double dt = 0.05;
    size_t steps = 4096;
};

// channels: x, v observations plus the forcing as an action channel;
// action[i] = a * cos(omega * dt * i) exactly
MultivariateSeries integrate_vdp(const VdpSpec& spec);

struct LorenzSpec {
    double sigma = 10.0;
    double rho = 28.0;
    double beta = 8.0 / 3.0;
    double x0 = 1.0;
    double y0 = 1.0;
    double z0 = 20.0;
    double dt = 0.01;
    size_t steps = 4096;
    size_t transient = 0;  // discarded leading steps
    size_t stride = 1;     // keep every stride-th sample
};

MultivariateSeries integrate_lorenz(const LorenzSpec& spec);

std::vector<double> logistic_map(double r, double x0, size_t steps);

// sweep helpers: seed jitters the initial state so repeated runs explore
// nearby trajectories deterministically
MultivariateSeries vdp_run(double a, uint64_t seed, size_t steps = 4096, double mu = 6.0,
                           double omega = 1.788, double dt = 0.05);
std::vector<double> lorenz_x_strided(uint64_t seed, size_t n = 4096, size_t stride = 10,
                                     size_t transient = 20000, double dt = 0.01);

}  // namespace chaosforge
