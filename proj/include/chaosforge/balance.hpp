#pragma once
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "chaosforge/errors.hpp"

namespace chaosforge {

struct BalanceReport {
    std::vector<double> probs;  // over regimes with nonzero count
    double h_nats = 0.0;
    double h_norm = 0.0;
    double granularity = 0.0;
    double b_entropy = 0.0;
    double b_cv = 0.0;
    size_t reference_regimes = 0;
};

// both score variants from a regime count vector; zero-count regimes are
// dropped before n is taken
BalanceReport balance_report(const std::vector<size_t>& counts, size_t reference_regimes,
                             double alpha_entropy = 0.6, double alpha_cv = 0.5);

double shannon_balance(const std::vector<size_t>& counts, size_t reference_regimes,
                       double alpha = 0.6);
double cv_balance(const std::vector<size_t>& counts, size_t reference_regimes,
                  double alpha = 0.5);

enum class BalanceMetric { entropy, cv };

struct LabeledSample {
    std::string sample_id;
    std::string source_id;
    std::string regime;
};

struct CurationResult {
    std::vector<std::string> selected;              // sample ids, acceptance order
    std::map<std::string, size_t> source_accepts;   // source -> accepted count
    std::vector<double> trajectory;                 // score after each acceptance
    BalanceReport final_report;
    size_t evaluations = 0;
};

// greedy curation: seeded per-source shuffle, round-robin draws, accept
// only strict score improvements, stop at fraction of |D| or source
// exhaustion
CurationResult curate_subset(const std::vector<LabeledSample>& samples, uint64_t seed,
                             double fraction = 0.5,
                             BalanceMetric metric = BalanceMetric::entropy);

struct BalanceComparison {
    BalanceReport a;
    BalanceReport b;
    int ordering = 0;  // +1 a higher, -1 b higher, 0 tie (by b_entropy)
};

// score two regime histograms under the shared reference granularity
// (the larger regime count of the two)
BalanceComparison compare_balance(const std::map<std::string, size_t>& regimes_a,
                                  const std::map<std::string, size_t>& regimes_b);

}  // namespace chaosforge
