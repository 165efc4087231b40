#include "chaosforge/balance.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "chaosforge/rng.hpp"

namespace chaosforge {

BalanceReport balance_report(const std::vector<size_t>& counts, size_t reference_regimes,
                             double alpha_entropy, double alpha_cv) {
    size_t total = 0;
    std::vector<size_t> nz;
    for (size_t c : counts)
        if (c > 0) {
            nz.push_back(c);
            total += c;
        }
    if (total == 0) throw InputError("balance_report: total count is zero");
    const size_t n = nz.size();
    if (reference_regimes < n) throw InputError("balance_report: reference below regime count");

    BalanceReport r;
    r.reference_regimes = reference_regimes;
    r.probs.reserve(n);
    for (size_t c : nz) r.probs.push_back(static_cast<double>(c) / static_cast<double>(total));

    for (double p : r.probs) r.h_nats -= p * std::log(p);
    r.h_norm = n == 1 ? 0.0 : r.h_nats / std::log(static_cast<double>(n));
    r.granularity = static_cast<double>(n) / static_cast<double>(reference_regimes);
    r.b_entropy = alpha_entropy * r.h_norm + (1.0 - alpha_entropy) * r.granularity;

    double mu = 1.0 / static_cast<double>(n);
    double var = 0.0;
    for (double p : r.probs) {
        double diff = p - mu;
        var += diff * diff;
    }
    double cv = std::sqrt(var / static_cast<double>(n)) / mu;
    double homog = cv == 0.0 ? 1.0 : std::min(1.0, 1.0 / cv);
    r.b_cv = alpha_cv * homog + (1.0 - alpha_cv) * r.granularity;
    return r;
}

double shannon_balance(const std::vector<size_t>& counts, size_t reference_regimes,
                       double alpha) {
    return balance_report(counts, reference_regimes, alpha).b_entropy;
}

double cv_balance(const std::vector<size_t>& counts, size_t reference_regimes, double alpha) {
    return balance_report(counts, reference_regimes, 0.6, alpha).b_cv;
}

namespace {

double score_counts(const std::map<std::string, size_t>& by_regime, size_t reference,
                    BalanceMetric metric) {
    std::vector<size_t> counts;
    counts.reserve(by_regime.size());
    for (const auto& [_, c] : by_regime) counts.push_back(c);
    BalanceReport r = balance_report(counts, reference);
    return metric == BalanceMetric::entropy ? r.b_entropy : r.b_cv;
}

}  // namespace

CurationResult curate_subset(const std::vector<LabeledSample>& samples, uint64_t seed,
                             double fraction, BalanceMetric metric) {
    if (samples.empty()) throw InputError("curate_subset: empty dataset");
    if (fraction <= 0.0 || fraction > 1.0)
        throw InputError("curate_subset: fraction must be in (0, 1]");

    // sources in first-appearance order, each with a seeded shuffle
    std::vector<std::string> source_order;
    std::map<std::string, std::vector<size_t>> by_source;
    std::map<std::string, size_t> ref_labels;
    for (size_t i = 0; i < samples.size(); ++i) {
        if (!by_source.count(samples[i].source_id)) source_order.push_back(samples[i].source_id);
        by_source[samples[i].source_id].push_back(i);
        ++ref_labels[samples[i].regime];
    }
    const size_t reference = ref_labels.size();
    Rng rng(seed);
    std::map<std::string, std::deque<size_t>> queues;
    for (const auto& src : source_order) {
        auto idx = by_source[src];
        Rng r = rng.fork("source:" + src);
        r.shuffle(idx);
        queues[src].assign(idx.begin(), idx.end());
    }

    CurationResult res;
    std::map<std::string, size_t> sel_counts;
    const double target = fraction * static_cast<double>(samples.size());
    double cur_score = 0.0;
    bool done = false, any = true;
    while (any && !done) {
        any = false;
        for (const auto& src : source_order) {
            auto& q = queues[src];
            if (q.empty()) continue;
            if (static_cast<double>(res.selected.size()) >= target) {
                done = true;
                break;
            }
            any = true;
            size_t cand = q.front();
            q.pop_front();
            ++res.evaluations;

            auto trial = sel_counts;
            ++trial[samples[cand].regime];
            double trial_score = score_counts(trial, reference, metric);
            if (res.selected.empty() || trial_score > cur_score) {
                sel_counts = std::move(trial);
                cur_score = trial_score;
                res.selected.push_back(samples[cand].sample_id);
                ++res.source_accepts[src];
                res.trajectory.push_back(cur_score);
            }
        }
    }
    std::vector<size_t> final_counts;
    for (const auto& [_, v] : sel_counts) final_counts.push_back(v);
    res.final_report = balance_report(final_counts, reference);
    return res;
}

BalanceComparison compare_balance(const std::map<std::string, size_t>& regimes_a,
                                  const std::map<std::string, size_t>& regimes_b) {
    auto nonzero = [](const std::map<std::string, size_t>& m) {
        size_t n = 0;
        for (const auto& [_, c] : m)
            if (c > 0) ++n;
        return n;
    };
    auto counts = [](const std::map<std::string, size_t>& m) {
        std::vector<size_t> c;
        for (const auto& [_, v] : m) c.push_back(v);
        return c;
    };
    size_t reference = std::max(nonzero(regimes_a), nonzero(regimes_b));
    if (reference == 0) throw InputError("compare_balance: both inputs empty");

    BalanceComparison cmp;
    cmp.a = balance_report(counts(regimes_a), reference);
    cmp.b = balance_report(counts(regimes_b), reference);
    if (cmp.a.b_entropy > cmp.b.b_entropy)
        cmp.ordering = 1;
    else if (cmp.a.b_entropy < cmp.b.b_entropy)
        cmp.ordering = -1;
    return cmp;
}

}  // namespace chaosforge
