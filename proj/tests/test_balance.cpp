#include <cmath>
#include <string>
#include <vector>

#include "doctest.h"

#include "chaosforge/balance.hpp"

using namespace chaosforge;

namespace {

std::vector<LabeledSample> two_source_corpus(size_t na, size_t nb) {
    std::vector<LabeledSample> d;
    for (size_t i = 0; i < na; ++i)
        d.push_back({"a" + std::to_string(i), "A", "regime_x"});
    for (size_t i = 0; i < nb; ++i)
        d.push_back({"b" + std::to_string(i), "B", "regime_y"});
    return d;
}

}  // namespace

TEST_CASE("uniform full-granularity distribution scores 1") {
    BalanceReport r = balance_report({5, 5, 5, 5}, 4);
    CHECK(r.h_norm == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.granularity == doctest::Approx(1.0));
    CHECK(r.b_entropy == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.b_cv == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("hand-computed entropy balance case") {
    // p = [0.5, 0.25, 0.25] against reference granularity 4
    BalanceReport r = balance_report({2, 1, 1}, 4);
    CHECK(std::fabs(r.b_entropy - 0.8678) < 1e-3);
    double h = -(0.5 * std::log(0.5) + 2 * 0.25 * std::log(0.25));
    double expect = 0.6 * h / std::log(3.0) + 0.4 * 0.75;
    CHECK(std::fabs(r.b_entropy - expect) < 1e-6);
}

TEST_CASE("cv balance caps the inverse dispersion term") {
    // p = [0.75, 0.25]: CV = 0.5 -> 1/CV = 2 capped at 1
    BalanceReport r = balance_report({3, 1}, 2);
    CHECK(r.b_cv == doctest::Approx(0.5 * 1.0 + 0.5 * 1.0).epsilon(1e-12));
    BalanceReport u = balance_report({2, 2}, 4);
    CHECK(u.b_cv == doctest::Approx(0.5 + 0.5 * 0.5).epsilon(1e-12));
}

TEST_CASE("balance report drops zero counts and validates input") {
    BalanceReport r = balance_report({3, 0, 3}, 2);
    CHECK(r.probs.size() == 2);
    CHECK(r.granularity == doctest::Approx(1.0));
    CHECK_THROWS_AS(balance_report({0, 0}, 2), InputError);
    CHECK_THROWS_AS(balance_report({1, 1, 1}, 2), InputError);
}

TEST_CASE("single regime gets zero normalized entropy") {
    BalanceReport r = balance_report({10}, 2);
    CHECK(r.h_norm == 0.0);
    CHECK(r.b_entropy == doctest::Approx(0.4 * 0.5).epsilon(1e-12));
}

TEST_CASE("scaling counts leaves shannon balance unchanged") {
    CHECK(shannon_balance({2, 1, 1}, 4) == doctest::Approx(shannon_balance({20, 10, 10}, 4)));
    CHECK(shannon_balance({1, 2, 1}, 4) == doctest::Approx(shannon_balance({2, 1, 1}, 4)));
}

TEST_CASE("moving a sample from largest to smallest regime raises the score") {
    double before = shannon_balance({6, 2}, 2);
    double after = shannon_balance({5, 3}, 2);
    CHECK(after > before);
}

TEST_CASE("curation strictly beats concatenation on unbalanced two-source corpora") {
    for (size_t na = 2; na <= 19; ++na) {
        for (size_t nb = 1; nb < na && na + nb <= 20; ++nb) {
            auto d = two_source_corpus(na, nb);
            CurationResult res = curate_subset(d, 7);
            CHECK(res.evaluations <= d.size());
            CHECK(res.selected.size() <= (d.size() + 1) / 2);  // ceil(0.5 |D|)

            std::map<std::string, size_t> curated;
            for (const auto& id : res.selected) curated[id[0] == 'a' ? "regime_x" : "regime_y"]++;
            BalanceComparison cmp = compare_balance({{"regime_x", na}, {"regime_y", nb}}, curated);
            CHECK(cmp.b.b_entropy > cmp.a.b_entropy);
            CHECK(cmp.ordering == -1);
        }
    }
}

TEST_CASE("curation trajectory is non-decreasing and deterministic") {
    std::vector<LabeledSample> d;
    const char* regimes[] = {"r1", "r2", "r3"};
    for (int i = 0; i < 12; ++i)
        d.push_back({"s" + std::to_string(i), i % 2 == 0 ? "A" : "B", regimes[i % 3]});
    CurationResult a = curate_subset(d, 42);
    CurationResult b = curate_subset(d, 42);
    CHECK(a.selected == b.selected);
    CHECK(a.trajectory == b.trajectory);
    for (size_t i = 1; i < a.trajectory.size(); ++i)
        CHECK(a.trajectory[i] >= a.trajectory[i - 1]);
    CHECK(a.trajectory.size() == a.selected.size());
}

TEST_CASE("single source single regime accepts only the seed sample") {
    std::vector<LabeledSample> d;
    for (int i = 0; i < 8; ++i) d.push_back({"s" + std::to_string(i), "A", "only"});
    CurationResult res = curate_subset(d, 3);
    CHECK(res.selected.size() == 1);
    CHECK(res.evaluations <= d.size());
}

TEST_CASE("curation respects the cv metric switch") {
    auto d = two_source_corpus(10, 1);
    CurationResult res = curate_subset(d, 5, 0.5, BalanceMetric::cv);
    std::map<std::string, size_t> curated;
    for (const auto& id : res.selected) curated[id[0] == 'a' ? "regime_x" : "regime_y"]++;
    BalanceComparison cmp = compare_balance({{"regime_x", 10}, {"regime_y", 1}}, curated);
    CHECK(cmp.b.b_cv >= cmp.a.b_cv);
}

TEST_CASE("compare_balance uses the shared reference and orders correctly") {
    BalanceComparison tie = compare_balance({{"x", 2}, {"y", 2}}, {{"x", 2}, {"y", 2}});
    CHECK(tie.ordering == 0);
    CHECK(tie.a.b_entropy == tie.b.b_entropy);

    BalanceComparison cmp =
        compare_balance({{"x", 1}, {"y", 1}, {"z", 1}, {"w", 1}}, {{"x", 4}});
    CHECK(cmp.ordering == 1);
    CHECK(cmp.a.reference_regimes == 4);
    CHECK(cmp.b.reference_regimes == 4);
    CHECK(cmp.a.b_cv > cmp.b.b_cv);
}
