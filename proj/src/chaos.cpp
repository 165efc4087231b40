#include "chaosforge/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chaosforge/persistence.hpp"

namespace chaosforge {

TakensCloud takens_embed(const std::vector<double>& x, size_t delay, size_t dim) {
    if (delay < 1 || dim < 1) throw InputError("takens_embed: delay and dim must be >= 1");
    if (x.size() <= (dim - 1) * delay) throw InputError("takens_embed: series too short");
    TakensCloud c;
    c.dim = dim;
    c.delay = delay;
    c.count = x.size() - (dim - 1) * delay;
    c.points.resize(c.count * dim);
    for (size_t i = 0; i < c.count; ++i)
        for (size_t d = 0; d < dim; ++d) c.points[i * dim + d] = x[i + d * delay];
    return c;
}

// least-squares slope of y against x
static double lsq_slope(const double* xs, const double* ys, size_t n) {
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < n; ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    return den > 0.0 ? num / den : 0.0;
}

double dfa_exponent(const std::vector<double>& x) {
    const size_t N = x.size();
    if (N < 64) throw InputError("dfa_exponent: need at least 64 samples");

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(N);
    std::vector<double> profile(N);
    double acc = 0.0;
    for (size_t i = 0; i < N; ++i) {
        acc += x[i] - mean;
        profile[i] = acc;
    }

    // log-spaced window sizes in [4, N/4], deduplicated after rounding
    const double lo = std::log(4.0), hi = std::log(static_cast<double>(N) / 4.0);
    const int candidates = 24;
    std::vector<size_t> sizes;
    for (int i = 0; i < candidates; ++i) {
        double t = candidates == 1 ? 0.0 : static_cast<double>(i) / (candidates - 1);
        size_t n = static_cast<size_t>(std::llround(std::exp(lo + t * (hi - lo))));
        n = std::clamp<size_t>(n, 4, N / 4);
        if (sizes.empty() || n != sizes.back()) sizes.push_back(n);
    }

    std::vector<double> logn, logf;
    std::vector<double> t(N), w(N);
    for (size_t n : sizes) {
        const size_t windows = N / n;
        double ss = 0.0;
        for (size_t i = 0; i < n; ++i) t[i] = static_cast<double>(i);
        for (size_t wi = 0; wi < windows; ++wi) {
            const double* seg = profile.data() + wi * n;
            double slope = lsq_slope(t.data(), seg, n);
            double mt = (static_cast<double>(n) - 1.0) / 2.0;
            double ms = 0.0;
            for (size_t i = 0; i < n; ++i) ms += seg[i];
            ms /= static_cast<double>(n);
            for (size_t i = 0; i < n; ++i) {
                double r = seg[i] - (ms + slope * (t[i] - mt));
                ss += r * r;
            }
        }
        double f = std::sqrt(ss / static_cast<double>(windows * n));
        if (f > 0.0) {
            logn.push_back(std::log(static_cast<double>(n)));
            logf.push_back(std::log(f));
        }
    }
    if (logn.size() < 2) throw NumericError("dfa_exponent: zero fluctuation at all scales");
    return lsq_slope(logn.data(), logf.data(), logn.size());
}

DivergenceCurve lyapunov_divergence(const std::vector<double>& x, size_t embdim,
                                    size_t tau, size_t minsep) {
    if (x.size() <= (embdim - 1) * tau + 2 * minsep + 20)
        throw InputError("lyapunov: series too short for the requested embedding");
    TakensCloud cloud = takens_embed(x, tau, embdim);
    const size_t M = cloud.count;
    const size_t D = cloud.dim;

    // nearest neighbor with temporal separation >= minsep
    std::vector<size_t> nn(M);
    for (size_t i = 0; i < M; ++i) {
        const double* pi = cloud.point(i);
        double best = std::numeric_limits<double>::infinity();
        size_t bj = i;
        for (size_t j = 0; j < M; ++j) {
            size_t sep = i > j ? i - j : j - i;
            if (sep < minsep) continue;
            const double* pj = cloud.point(j);
            double d2 = 0.0;
            for (size_t d = 0; d < D; ++d) {
                double diff = pi[d] - pj[d];
                d2 += diff * diff;
            }
            if (d2 < best) {
                best = d2;
                bj = j;
            }
        }
        nn[i] = bj;
    }

    const size_t K = std::min<size_t>(50, M / 10);
    DivergenceCurve curve;
    curve.K = K;
    curve.mean_log_dist.resize(K + 1);

    // distances first; exact zeros floored afterwards with the smallest
    // positive distance seen anywhere in the curve
    std::vector<std::vector<double>> dists(K + 1);
    double min_pos = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k <= K; ++k) {
        auto& dk = dists[k];
        for (size_t i = 0; i < M; ++i) {
            if (i + k >= M || nn[i] + k >= M) continue;
            const double* a = cloud.point(i + k);
            const double* b = cloud.point(nn[i] + k);
            double d2 = 0.0;
            for (size_t d = 0; d < D; ++d) {
                double diff = a[d] - b[d];
                d2 += diff * diff;
            }
            double dist = std::sqrt(d2);
            dk.push_back(dist);
            if (dist > 0.0 && dist < min_pos) min_pos = dist;
        }
    }
    if (!std::isfinite(min_pos)) throw NumericError("lyapunov: all pair distances are zero");
    for (size_t k = 0; k <= K; ++k) {
        double acc = 0.0;
        for (double d : dists[k]) acc += std::log(d > 0.0 ? d : min_pos);
        curve.mean_log_dist[k] = acc / static_cast<double>(dists[k].size());
    }
    return curve;
}

double lyapunov_fit(const DivergenceCurve& c) {
    const auto& y = c.mean_log_dist;
    const size_t K = c.K;
    if (K < 2) throw NumericError("lyapunov: divergence horizon too short");
    if (y[K] <= y[0]) return (y[K] - y[0]) / static_cast<double>(K);
    std::vector<double> ks(K + 1);
    for (size_t k = 0; k <= K; ++k) ks[k] = static_cast<double>(k);
    double best = -std::numeric_limits<double>::infinity();
    const size_t kmax = std::max<size_t>(2, K / 2);
    for (size_t kc = 2; kc <= kmax; ++kc)
        best = std::max(best, lsq_slope(ks.data(), y.data(), kc + 1));
    return best;
}

double lyapunov_exponent(const std::vector<double>& x, size_t embdim, size_t tau,
                         size_t minsep) {
    return lyapunov_fit(lyapunov_divergence(x, embdim, tau, minsep));
}

ChaosProfile chaos_profile(const std::vector<double>& x) {
    if (x.size() < 128) throw InputError("chaos_profile: need at least 128 samples");
    ChaosProfile p;
    p.dfa = dfa_exponent(x);
    p.lyapunov = lyapunov_exponent(x);
    PersistenceDiagram d = vr_persistence(takens_embed(x, 1, 5));
    p.pe_h0 = persistent_entropy(d, 0);
    p.pe_h1 = persistent_entropy(d, 1);
    return p;
}

}  // namespace chaosforge
