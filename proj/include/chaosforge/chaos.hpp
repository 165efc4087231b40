#pragma once
#include <cstddef>
#include <vector>

#include "chaosforge/errors.hpp"

namespace chaosforge {

struct ChaosProfile {
    double dfa = 0.0;
    double lyapunov = 0.0;  // nats per timestep
    double pe_h0 = 0.0;
    double pe_h1 = 0.0;
};

struct TakensCloud {
    std::vector<double> points;  // count x dim, row-major
    size_t dim = 0;
    size_t delay = 1;
    size_t count = 0;

    const double* point(size_t i) const { return points.data() + i * dim; }
};

TakensCloud takens_embed(const std::vector<double>& x, size_t delay, size_t dim);

// DFA-1 scaling exponent; requires length >= 64
double dfa_exponent(const std::vector<double>& x);

// mean log divergence of nearest-neighbor pairs, k = 0..K
struct DivergenceCurve {
    std::vector<double> mean_log_dist;
    size_t K = 0;
};

DivergenceCurve lyapunov_divergence(const std::vector<double>& x, size_t embdim,
                                    size_t tau, size_t minsep);

// slope extraction from the divergence curve: net contraction uses the
// two-point slope over the full horizon, growth uses the steepest
// least-squares fit over [0, kc] for kc in [2, K/2]
double lyapunov_fit(const DivergenceCurve& c);

double lyapunov_exponent(const std::vector<double>& x, size_t embdim = 10,
                         size_t tau = 1, size_t minsep = 10);

// full per-channel profile: DFA, Lyapunov (embdim=10/tau=1/minsep=10) and
// persistent entropy on the delay=1/dim=5 embedding; requires length >= 128
ChaosProfile chaos_profile(const std::vector<double>& x);

}  // namespace chaosforge
