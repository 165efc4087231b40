#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"

#include "chaosforge/errors.hpp"
#include "chaosforge/evaluation.hpp"
#include "chaosforge/rng.hpp"
#include "chaosforge/series.hpp"

using namespace chaosforge;

namespace {

// cheapest monotone alignment path by explicit enumeration, no DP
double dtw_path_oracle(const std::vector<double>& p, const std::vector<double>& t) {
    const size_t n = p.size(), m = t.size();
    auto cell = [&](size_t i, size_t j) {
        double d = p[i] - t[j];
        return d * d;
    };
    struct Node {
        size_t i, j;
        double cost;
    };
    double best = std::numeric_limits<double>::infinity();
    std::vector<Node> stack{{0, 0, cell(0, 0)}};
    while (!stack.empty()) {
        Node nd = stack.back();
        stack.pop_back();
        if (nd.i == n - 1 && nd.j == m - 1) {
            best = std::min(best, nd.cost);
            continue;
        }
        if (nd.i + 1 < n) stack.push_back({nd.i + 1, nd.j, nd.cost + cell(nd.i + 1, nd.j)});
        if (nd.j + 1 < m) stack.push_back({nd.i, nd.j + 1, nd.cost + cell(nd.i, nd.j + 1)});
        if (nd.i + 1 < n && nd.j + 1 < m)
            stack.push_back({nd.i + 1, nd.j + 1, nd.cost + cell(nd.i + 1, nd.j + 1)});
    }
    return best;
}

MultivariateSeries obs_context(const std::vector<std::vector<double>>& chans) {
    MultivariateSeries s;
    for (size_t c = 0; c < chans.size(); ++c) {
        s.channel_names.push_back("c" + std::to_string(c));
        s.roles.push_back(Role::observation);
        s.values.push_back(chans[c]);
    }
    return s;
}

}  // namespace

TEST_CASE("mae matches hand values and validates shapes") {
    CHECK(mae({1.0, 2.0, 3.0}, {2.0, 2.0, 5.0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mae({1.0, 1.0}, {1.0, 1.0}) == 0.0);

    std::vector<std::vector<double>> p{{0.0, 0.0}, {1.0, 5.0}};
    std::vector<std::vector<double>> t{{1.0, 1.0}, {1.0, 1.0}};
    CHECK(mae(p, t) == doctest::Approx(1.5).epsilon(1e-12));  // (1 + 2) / 2

    CHECK_THROWS_AS(mae({1.0}, {1.0, 2.0}), InputError);
    CHECK_THROWS_AS(mae(std::vector<double>{}, std::vector<double>{}), InputError);
    CHECK_THROWS_AS(mae(p, std::vector<std::vector<double>>{{1.0, 1.0}}), InputError);
}

TEST_CASE("hard dtw equals the path-enumeration oracle for all lengths up to 6") {
    Rng rng(6021);
    for (size_t n = 1; n <= 6; ++n)
        for (size_t m = 1; m <= 6; ++m)
            for (int trial = 0; trial < 20; ++trial) {
                std::vector<double> p(n), t(m);
                for (auto& v : p) v = rng.uniform01() * 4.0 - 2.0;
                for (auto& v : t) v = rng.uniform01() * 4.0 - 2.0;
                double got = soft_dtw(p, t, 0.0);
                double want = dtw_path_oracle(p, t);
                CHECK(std::fabs(got - want) < 1e-12);
            }
}

TEST_CASE("soft dtw reproduces the 2x2 hand case") {
    std::vector<double> p{0.0, 0.0}, t{1.0, 1.0};
    CHECK(soft_dtw(p, t, 0.0) == doctest::Approx(2.0).epsilon(1e-12));

    // explicit 2x2 DP: R11 = 1, R12 = R21 = 2,
    // R22 = 1 + softmin(2, 2, 1) = 1 - ln(e^-1 + 2 e^-2)
    double want = 1.0 - std::log(std::exp(-1.0) + 2.0 * std::exp(-2.0));
    CHECK(std::fabs(soft_dtw(p, t, 1.0) - want) < 1e-9);
    CHECK(std::fabs(soft_dtw(p, t, 1.0) - want) < 1e-4);
}

TEST_CASE("soft dtw is a lower bound of hard dtw and zero on self") {
    Rng rng(88);
    for (int trial = 0; trial < 50; ++trial) {
        size_t n = 2 + rng.below(10), m = 2 + rng.below(10);
        std::vector<double> p(n), t(m);
        for (auto& v : p) v = rng.gaussian();
        for (auto& v : t) v = rng.gaussian();
        double hard = soft_dtw(p, t, 0.0);
        CHECK(soft_dtw(p, t, 0.5) <= hard + 1e-12);
        CHECK(soft_dtw(p, t, 2.0) <= hard + 1e-12);
        CHECK(soft_dtw(p, p, 0.0) == 0.0);
    }
    CHECK_THROWS_AS(soft_dtw(std::vector<double>{}, std::vector<double>{1.0}, 0.0), InputError);
    CHECK_THROWS_AS(soft_dtw(std::vector<double>{1.0}, std::vector<double>{1.0}, -0.5),
                    InputError);
}

TEST_CASE("freq metrics compare magnitude spectra") {
    std::vector<double> x(32), y(32);
    for (size_t i = 0; i < 32; ++i) {
        x[i] = std::sin(2.0 * 3.14159265358979323846 * 4.0 * static_cast<double>(i) / 32.0);
        y[i] = x[i];
    }
    FreqMetrics same = freq_metrics(x, y);
    CHECK(same.cos_sim == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(same.eucl == doctest::Approx(0.0).epsilon(1e-12));

    // a zero signal has a zero spectrum: cosine degenerates to 0
    std::vector<double> z(32, 0.0);
    FreqMetrics zero = freq_metrics(z, y);
    CHECK(zero.cos_sim == 0.0);
    CHECK(zero.eucl > 0.0);

    CHECK_THROWS_AS(freq_metrics(std::vector<double>{1.0}, {1.0}), InputError);
    CHECK_THROWS_AS(freq_metrics(x, std::vector<double>(16, 0.0)), InputError);
}

TEST_CASE("latent metrics embed, pool, and compare") {
    Rng rng(7);
    std::vector<std::vector<double>> x(2, std::vector<double>(24));
    for (auto& ch : x)
        for (auto& v : ch) v = rng.gaussian();

    LatentMetrics self = latent_metrics(x, x, 4);
    CHECK(self.cos_sim == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(self.eucl == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(self.embed_size == 2 * (4 + 4 / 2 + 1));

    std::vector<std::vector<double>> y = x;
    for (auto& v : y[0]) v = -v + 0.25;
    LatentMetrics diff = latent_metrics(x, y, 4);
    CHECK(diff.eucl > 0.0);

    CHECK_THROWS_AS(latent_metrics(x, std::vector<std::vector<double>>{x[0]}, 4), InputError);
}

TEST_CASE("final score recomposes from its six components") {
    Rng rng(55);
    for (int trial = 0; trial < 200; ++trial) {
        double m = rng.uniform01() * 3.0;
        double s = rng.uniform01() * 40.0;
        double fc = rng.uniform01() * 2.0 - 1.0;
        double fe = rng.uniform01() * 10.0;
        double lc = rng.uniform01() * 2.0 - 1.0;
        double le = rng.uniform01() * 10.0;
        size_t pl = 1 + rng.below(512);
        size_t es = 1 + rng.below(64);
        double got = final_score(m, s, fc, fe, lc, le, pl, es);
        double want = (m + s / static_cast<double>(pl) + (1.0 - fc) +
                       fe / (0.5 * static_cast<double>(pl)) + (1.0 - lc) +
                       le / static_cast<double>(es)) /
                      6.0;
        CHECK(std::fabs(got - want) < 1e-12);
    }
    CHECK_THROWS_AS(final_score(0, 0, 0, 0, 0, 0, 0, 8), InputError);
    CHECK_THROWS_AS(final_score(0, 0, 0, 0, 0, 0, 8, 0), InputError);
}

TEST_CASE("a perfect forecast scores zero under gamma 0") {
    Rng rng(99);
    std::vector<std::vector<double>> ctx(2, std::vector<double>(64));
    for (auto& ch : ctx)
        for (auto& v : ch) v = rng.gaussian();
    MultivariateSeries context = obs_context(ctx);

    std::vector<std::vector<double>> truth(2, std::vector<double>(32));
    for (auto& ch : truth)
        for (auto& v : ch) v = rng.gaussian();

    EvalReport r = evaluate(context, truth, truth, 0.0, 4);
    CHECK(r.mae == 0.0);
    CHECK(r.soft_dtw == 0.0);
    CHECK(std::fabs(r.freq_cos_sim - 1.0) < 1e-12);
    CHECK(r.freq_eucl == 0.0);
    CHECK(std::fabs(r.latent_cos_sim - 1.0) < 1e-12);
    CHECK(r.latent_eucl == 0.0);
    CHECK(std::fabs(r.final_score) < 1e-12);
    CHECK(r.pred_length == 32);
    CHECK(r.embed_size == 2 * (4 + 4 / 2 + 1));
    CHECK(r.gamma == 0.0);
}

TEST_CASE("evaluate z-normalizes with context statistics") {
    // context mean 2 and population std 2 per channel
    MultivariateSeries context = obs_context({{0.0, 0.0, 4.0, 4.0, 0.0, 0.0, 4.0, 4.0}});
    std::vector<std::vector<double>> truth{std::vector<double>(8, 4.0)};
    std::vector<std::vector<double>> pred{std::vector<double>(8, 2.0)};

    EvalReport r = evaluate(context, truth, pred, 0.0, 4);
    // z-truth is all 1, z-pred is all 0
    CHECK(r.mae == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.soft_dtw == doctest::Approx(8.0).epsilon(1e-12));

    CHECK_THROWS_AS(evaluate(context, {truth[0], truth[0]}, {pred[0], pred[0]}, 0.0, 4),
                    InputError);
    CHECK_THROWS_AS(evaluate(context, truth, {pred[0], pred[0]}, 0.0, 4), InputError);
}

TEST_CASE("naive forecast repeats the context mean per observation channel") {
    MultivariateSeries context = obs_context({{1.0, 2.0, 3.0}, {-4.0, 0.0, 1.0}});
    context.channel_names.push_back("u");
    context.roles.push_back(Role::action);
    context.values.push_back({9.0, 9.0, 9.0});

    auto f = naive_forecast(context, 5);
    REQUIRE(f.size() == 2);  // action channels excluded
    for (double v : f[0]) CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
    for (double v : f[1]) CHECK(v == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(f[0].size() == 5);

    CHECK_THROWS_AS(naive_forecast(MultivariateSeries{}, 5), InputError);
    CHECK_THROWS_AS(naive_forecast(context, 0), InputError);
}

TEST_CASE("seasonal naive finds the dominant period and tiles it") {
    // period-5 sawtooth, 8 full cycles
    std::vector<double> v;
    for (int cycle = 0; cycle < 8; ++cycle)
        for (int i = 0; i < 5; ++i) v.push_back(static_cast<double>(i));
    MultivariateSeries context = obs_context({v});

    auto f = seasonal_naive_forecast(context, 12);
    REQUIRE(f.size() == 1);
    REQUIRE(f[0].size() == 12);
    for (size_t i = 0; i < 12; ++i)
        CHECK(f[0][i] == v[v.size() - 5 + (i % 5)]);

    // constant context: every lag ties at zero, smallest lag wins, and the
    // tiled forecast is the constant
    MultivariateSeries flat = obs_context({std::vector<double>(16, 3.5)});
    auto g = seasonal_naive_forecast(flat, 6);
    for (double x : g[0]) CHECK(x == 3.5);

    CHECK_THROWS_AS(seasonal_naive_forecast(obs_context({{1.0, 2.0, 3.0}}), 4), InputError);
    CHECK_THROWS_AS(seasonal_naive_forecast(context, 0), InputError);
}
