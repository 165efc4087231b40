#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "chaosforge/chaos.hpp"
#include "chaosforge/errors.hpp"

namespace chaosforge {

struct MetricVector {
    double dfa = 0.0;
    double lyapunov = 0.0;
    double pe_h0 = 0.0;
    double pe_h1 = 0.0;
    std::string sample_id;
    std::string source_id;
};

// generic k-means over an n x d row-major matrix; features are standardized
// internally and centroids reported back in both spaces
struct KMeansFit {
    size_t k = 0;
    size_t dim = 0;
    std::vector<double> centroids;      // k x d, original units
    std::vector<double> centroids_std;  // k x d, standardized units
    std::vector<size_t> assignments;    // n
    double inertia = 0.0;               // standardized space
    std::vector<double> feature_means;  // d
    std::vector<double> feature_stds;   // d, zero-variance dims reported as 1
};

KMeansFit fit_kmeans(const std::vector<double>& points, size_t n, size_t d, size_t k,
                     uint64_t seed, int restarts = 10);

// kneedle-style elbow: max perpendicular distance to the first-last chord;
// inertias[i] is the inertia at k = i+1
size_t elbow_k(const std::vector<double>& inertias);

size_t select_k_star(size_t k_optimal, size_t k_max = 16);

std::vector<std::string> label_centroids(const std::vector<ChaosProfile>& centroids);

std::map<std::string, size_t> merge_regimes(const std::vector<std::string>& labels,
                                            const std::vector<size_t>& assignments);

struct RegimeClustering {
    size_t k_optimal = 0;
    size_t k_star = 0;
    KMeansFit fit;                          // over the 4 chaos metrics
    std::vector<std::string> labels;        // per centroid
    std::map<std::string, size_t> regimes;  // merged label -> member count
    uint64_t seed = 0;
};

// full regime pass: elbow sweep, k* refit, labeling, merge
RegimeClustering cluster_regimes(const std::vector<MetricVector>& samples, uint64_t seed,
                                 size_t k_max = 16);

}  // namespace chaosforge
