#include "chaosforge/clustering.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "chaosforge/rng.hpp"

namespace chaosforge {

namespace {

double dist2(const double* a, const double* b, size_t d) {
    double s = 0.0;
    for (size_t i = 0; i < d; ++i) {
        double diff = a[i] - b[i];
        s += diff * diff;
    }
    return s;
}

struct LloydResult {
    std::vector<double> centroids;  // k x d, standardized
    std::vector<size_t> assignments;
    double inertia = 0.0;
};

LloydResult lloyd(const std::vector<double>& z, size_t n, size_t d, size_t k, Rng& rng) {
    LloydResult r;
    r.centroids.resize(k * d);
    r.assignments.assign(n, 0);

    // k-means++ seeding
    std::vector<double> mind2(n, std::numeric_limits<double>::infinity());
    size_t first = static_cast<size_t>(rng.below(n));
    std::copy_n(z.data() + first * d, d, r.centroids.data());
    for (size_t c = 1; c < k; ++c) {
        for (size_t i = 0; i < n; ++i)
            mind2[i] = std::min(mind2[i], dist2(z.data() + i * d, r.centroids.data() + (c - 1) * d, d));
        size_t pick = rng.categorical(mind2);
        std::copy_n(z.data() + pick * d, d, r.centroids.data() + c * d);
    }

    std::vector<double> next(k * d);
    std::vector<size_t> counts(k);
    double prev_inertia = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 200; ++iter) {
        // assignment, ties to the lowest centroid index
        double inertia = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            size_t bj = 0;
            for (size_t j = 0; j < k; ++j) {
                double d2 = dist2(z.data() + i * d, r.centroids.data() + j * d, d);
                if (d2 < best) {
                    best = d2;
                    bj = j;
                }
            }
            r.assignments[i] = bj;
            inertia += best;
        }

        // empty-cluster repair: reseed from the farthest point
        std::fill(counts.begin(), counts.end(), size_t{0});
        for (size_t i = 0; i < n; ++i) ++counts[r.assignments[i]];
        bool repaired = false;
        for (size_t j = 0; j < k; ++j) {
            if (counts[j] > 0) continue;
            double far = -1.0;
            size_t fi = 0;
            for (size_t i = 0; i < n; ++i) {
                if (counts[r.assignments[i]] <= 1) continue;
                double d2 = dist2(z.data() + i * d, r.centroids.data() + r.assignments[i] * d, d);
                if (d2 > far) {
                    far = d2;
                    fi = i;
                }
            }
            std::copy_n(z.data() + fi * d, d, r.centroids.data() + j * d);
            --counts[r.assignments[fi]];
            r.assignments[fi] = j;
            ++counts[j];
            repaired = true;
        }
        if (repaired) {
            inertia = 0.0;
            for (size_t i = 0; i < n; ++i)
                inertia += dist2(z.data() + i * d, r.centroids.data() + r.assignments[i] * d, d);
        } else {
            assert(inertia <= prev_inertia + 1e-9);
            prev_inertia = inertia;
        }
        r.inertia = inertia;

        // update
        std::fill(next.begin(), next.end(), 0.0);
        for (size_t i = 0; i < n; ++i)
            for (size_t c = 0; c < d; ++c) next[r.assignments[i] * d + c] += z[i * d + c];
        double shift = 0.0;
        for (size_t j = 0; j < k; ++j) {
            for (size_t c = 0; c < d; ++c) {
                double v = next[j * d + c] / static_cast<double>(counts[j]);
                shift = std::max(shift, std::fabs(v - r.centroids[j * d + c]));
                r.centroids[j * d + c] = v;
            }
        }
        if (shift < 1e-6) break;
    }

    // final inertia against the settled centroids
    double inertia = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        size_t bj = 0;
        for (size_t j = 0; j < k; ++j) {
            double d2 = dist2(z.data() + i * d, r.centroids.data() + j * d, d);
            if (d2 < best) {
                best = d2;
                bj = j;
            }
        }
        r.assignments[i] = bj;
        inertia += best;
    }
    r.inertia = inertia;
    return r;
}

}  // namespace

KMeansFit fit_kmeans(const std::vector<double>& points, size_t n, size_t d, size_t k,
                     uint64_t seed, int restarts) {
    if (n == 0 || d == 0) throw InputError("fit_kmeans: empty input");
    if (k < 1 || k > n) throw InputError("fit_kmeans: k must be in [1, point count]");
    if (points.size() != n * d) throw InputError("fit_kmeans: shape mismatch");

    KMeansFit fit;
    fit.k = k;
    fit.dim = d;
    fit.feature_means.assign(d, 0.0);
    fit.feature_stds.assign(d, 1.0);
    for (size_t c = 0; c < d; ++c) {
        double m = 0.0;
        for (size_t i = 0; i < n; ++i) m += points[i * d + c];
        m /= static_cast<double>(n);
        double v = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double diff = points[i * d + c] - m;
            v += diff * diff;
        }
        double s = std::sqrt(v / static_cast<double>(n));
        fit.feature_means[c] = m;
        fit.feature_stds[c] = s > 0.0 ? s : 1.0;
    }
    std::vector<double> z(n * d);
    for (size_t i = 0; i < n; ++i)
        for (size_t c = 0; c < d; ++c)
            z[i * d + c] = (points[i * d + c] - fit.feature_means[c]) / fit.feature_stds[c];

    Rng rng(seed);
    LloydResult best;
    best.inertia = std::numeric_limits<double>::infinity();
    for (int r = 0; r < restarts; ++r) {
        LloydResult cur = lloyd(z, n, d, k, rng);
        if (cur.inertia < best.inertia) best = cur;
    }

    fit.centroids_std = best.centroids;
    fit.assignments = std::move(best.assignments);
    fit.inertia = best.inertia;
    fit.centroids.resize(k * d);
    for (size_t j = 0; j < k; ++j)
        for (size_t c = 0; c < d; ++c)
            fit.centroids[j * d + c] =
                fit.centroids_std[j * d + c] * fit.feature_stds[c] + fit.feature_means[c];
    return fit;
}

size_t elbow_k(const std::vector<double>& inertias) {
    const size_t n = inertias.size();
    if (n < 3) throw InputError("elbow_k: need at least 3 inertia entries");
    // perpendicular distance to the chord from (1, first) to (n, last);
    // the chord length is constant so the unnormalized cross term suffices
    const double x1 = 1.0, y1 = inertias.front();
    const double x2 = static_cast<double>(n), y2 = inertias.back();
    double best = -1.0;
    size_t best_k = 1;
    for (size_t i = 0; i < n; ++i) {
        double x = static_cast<double>(i + 1), y = inertias[i];
        double cross = std::fabs((y2 - y1) * x - (x2 - x1) * y + x2 * y1 - y2 * x1);
        if (cross > best + 1e-12) {
            best = cross;
            best_k = i + 1;
        }
    }
    return best_k;
}

size_t select_k_star(size_t k_optimal, size_t k_max) {
    if (k_optimal < 1) throw InputError("select_k_star: k_optimal must be >= 1");
    return std::min(k_max, 3 * k_optimal);
}

std::vector<std::string> label_centroids(const std::vector<ChaosProfile>& centroids) {
    const size_t k = centroids.size();
    if (k == 0) throw InputError("label_centroids: no centroids");
    double mean_lyap = 0.0, mean_h0 = 0.0, mean_h1 = 0.0;
    for (const auto& c : centroids) {
        mean_lyap += c.lyapunov;
        mean_h0 += c.pe_h0;
        mean_h1 += c.pe_h1;
    }
    mean_lyap /= static_cast<double>(k);
    mean_h0 /= static_cast<double>(k);
    mean_h1 /= static_cast<double>(k);

    std::vector<std::string> labels;
    labels.reserve(k);
    for (const auto& c : centroids) {
        std::string l;
        if (c.dfa < 0.5)
            l = "Anti-corr";
        else if (c.dfa < 1.0)
            l = "Positive-corr";
        else
            l = "Non-station";
        l += '|';
        if (c.lyapunov < 0.0)
            l += "Stable";
        else if (c.lyapunov < mean_lyap)
            l += "Rel Chaos";
        else
            l += "Rel Very Chaos";
        l += '|';
        l += c.pe_h0 < mean_h0 ? "Low Connect Complex" : "High Connect Complex";
        l += '|';
        l += c.pe_h1 < mean_h1 ? "Low Loop Complex" : "High Loop Complex";
        labels.push_back(std::move(l));
    }
    return labels;
}

std::map<std::string, size_t> merge_regimes(const std::vector<std::string>& labels,
                                            const std::vector<size_t>& assignments) {
    std::map<std::string, size_t> regimes;
    for (size_t a : assignments) {
        if (a >= labels.size()) throw InputError("merge_regimes: assignment out of range");
        ++regimes[labels[a]];
    }
    return regimes;
}

RegimeClustering cluster_regimes(const std::vector<MetricVector>& samples, uint64_t seed,
                                 size_t k_max) {
    const size_t n = samples.size();
    if (n == 0) throw InputError("cluster_regimes: no samples");
    std::vector<double> pts(n * 4);
    for (size_t i = 0; i < n; ++i) {
        pts[i * 4 + 0] = samples[i].dfa;
        pts[i * 4 + 1] = samples[i].lyapunov;
        pts[i * 4 + 2] = samples[i].pe_h0;
        pts[i * 4 + 3] = samples[i].pe_h1;
    }

    Rng rng(seed);
    const size_t sweep_max = std::min(k_max, n);
    std::vector<double> inertias;
    for (size_t k = 1; k <= sweep_max; ++k) {
        uint64_t s = rng.fork("sweep:k" + std::to_string(k)).base_seed();
        inertias.push_back(fit_kmeans(pts, n, 4, k, s).inertia);
    }
    size_t k_opt = inertias.size() >= 3 ? elbow_k(inertias) : 1;
    size_t k_star = std::min(select_k_star(k_opt, k_max), n);

    RegimeClustering rc;
    rc.k_optimal = k_opt;
    rc.k_star = k_star;
    rc.seed = seed;
    rc.fit = fit_kmeans(pts, n, 4, k_star, rng.fork("kstar").base_seed());
    std::vector<ChaosProfile> cents(k_star);
    for (size_t j = 0; j < k_star; ++j) {
        cents[j].dfa = rc.fit.centroids[j * 4 + 0];
        cents[j].lyapunov = rc.fit.centroids[j * 4 + 1];
        cents[j].pe_h0 = rc.fit.centroids[j * 4 + 2];
        cents[j].pe_h1 = rc.fit.centroids[j * 4 + 3];
    }
    rc.labels = label_centroids(cents);
    rc.regimes = merge_regimes(rc.labels, rc.fit.assignments);
    return rc;
}

}  // namespace chaosforge
