#include "chaosforge/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "chaosforge/dft.hpp"
#include "chaosforge/errors.hpp"

namespace chaosforge {

namespace {

void check_same_shape(const std::vector<std::vector<double>>& a,
                      const std::vector<std::vector<double>>& b, const char* op) {
    if (a.size() != b.size() || a.empty())
        throw InputError(std::string(op) + ": channel count mismatch");
    for (size_t c = 0; c < a.size(); ++c)
        if (a[c].size() != b[c].size())
            throw InputError(std::string(op) + ": length mismatch");
}

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double euclidean(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

double mae(const std::vector<double>& pred, const std::vector<double>& truth) {
    if (pred.size() != truth.size() || pred.empty())
        throw InputError("mae: sequences must have equal nonzero length");
    double s = 0.0;
    for (size_t i = 0; i < pred.size(); ++i) s += std::fabs(pred[i] - truth[i]);
    return s / static_cast<double>(pred.size());
}

double mae(const std::vector<std::vector<double>>& pred,
           const std::vector<std::vector<double>>& truth) {
    check_same_shape(pred, truth, "mae");
    double s = 0.0;
    for (size_t c = 0; c < pred.size(); ++c) s += mae(pred[c], truth[c]);
    return s / static_cast<double>(pred.size());
}

double soft_dtw(const std::vector<double>& pred, const std::vector<double>& truth,
                double gamma) {
    const size_t n = pred.size(), m = truth.size();
    if (n == 0 || m == 0) throw InputError("soft_dtw: empty sequence");
    if (gamma < 0.0) throw InputError("soft_dtw: gamma must be >= 0");

    auto softmin = [gamma](double a, double b, double c) {
        double lo = std::min({a, b, c});
        if (gamma == 0.0) return lo;
        double s = std::exp(-(a - lo) / gamma) + std::exp(-(b - lo) / gamma) +
                   std::exp(-(c - lo) / gamma);
        return lo - gamma * std::log(s);
    };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
    prev[0] = 0.0;
    for (size_t i = 1; i <= n; ++i) {
        cur[0] = inf;
        for (size_t j = 1; j <= m; ++j) {
            double d = pred[i - 1] - truth[j - 1];
            cur[j] = d * d + softmin(prev[j], cur[j - 1], prev[j - 1]);
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

double soft_dtw(const std::vector<std::vector<double>>& pred,
                const std::vector<std::vector<double>>& truth, double gamma) {
    if (pred.size() != truth.size() || pred.empty())
        throw InputError("soft_dtw: channel count mismatch");
    double s = 0.0;
    for (size_t c = 0; c < pred.size(); ++c) s += soft_dtw(pred[c], truth[c], gamma);
    return s / static_cast<double>(pred.size());
}

FreqMetrics freq_metrics(const std::vector<double>& pred, const std::vector<double>& truth) {
    if (pred.size() != truth.size() || pred.size() < 2)
        throw InputError("freq_metrics: need equal lengths >= 2");
    std::vector<double> sp = rdft_magnitude(pred);
    std::vector<double> st = rdft_magnitude(truth);
    return {cosine(sp, st), euclidean(sp, st)};
}

FreqMetrics freq_metrics(const std::vector<std::vector<double>>& pred,
                         const std::vector<std::vector<double>>& truth) {
    check_same_shape(pred, truth, "freq_metrics");
    FreqMetrics f;
    for (size_t c = 0; c < pred.size(); ++c) {
        FreqMetrics fc = freq_metrics(pred[c], truth[c]);
        f.cos_sim += fc.cos_sim;
        f.eucl += fc.eucl;
    }
    f.cos_sim /= static_cast<double>(pred.size());
    f.eucl /= static_cast<double>(pred.size());
    return f;
}

namespace {

std::vector<double> pooled_embedding(const std::vector<std::vector<double>>& x,
                                     size_t patch_length, size_t& embed_size) {
    MultivariateSeries s;
    for (size_t c = 0; c < x.size(); ++c) {
        s.channel_names.push_back("c" + std::to_string(c));
        s.roles.push_back(Role::observation);
        s.values.push_back(x[c]);
    }
    EmbeddingMatrix e = embed_patches(patchify(s, patch_length));
    embed_size = e.dim;
    std::vector<double> pooled(e.dim, 0.0);
    for (size_t r = 0; r < e.rows; ++r)
        for (size_t c = 0; c < e.dim; ++c) pooled[c] += e.at(r, c);
    for (double& v : pooled) v /= static_cast<double>(e.rows);
    return pooled;
}

}  // namespace

LatentMetrics latent_metrics(const std::vector<std::vector<double>>& pred,
                             const std::vector<std::vector<double>>& truth,
                             size_t patch_length) {
    check_same_shape(pred, truth, "latent_metrics");
    LatentMetrics lm;
    size_t dp = 0, dt = 0;
    std::vector<double> ep = pooled_embedding(pred, patch_length, dp);
    std::vector<double> et = pooled_embedding(truth, patch_length, dt);
    lm.cos_sim = cosine(ep, et);
    lm.eucl = euclidean(ep, et);
    lm.embed_size = dp;
    return lm;
}

double final_score(double mae_v, double soft_dtw_v, double freq_cos, double freq_eucl,
                   double latent_cos, double latent_eucl, size_t pred_length,
                   size_t embed_size) {
    if (pred_length == 0 || embed_size == 0)
        throw InputError("final_score: pred_length and embed_size must be positive");
    double pl = static_cast<double>(pred_length);
    double d = static_cast<double>(embed_size);
    return (mae_v + soft_dtw_v / pl + (1.0 - freq_cos) + freq_eucl / (0.5 * pl) +
            (1.0 - latent_cos) + latent_eucl / d) /
           6.0;
}

EvalReport evaluate(const MultivariateSeries& context,
                    const std::vector<std::vector<double>>& truth,
                    const std::vector<std::vector<double>>& forecast, double gamma,
                    size_t patch_length) {
    check_same_shape(truth, forecast, "evaluate");
    const auto obs = context.obs_indices();
    if (truth.size() != obs.size())
        throw InputError("evaluate: channel count differs from context observation channels");

    // context z-normalization, applied identically to truth and forecast
    std::vector<std::vector<double>> zt = truth, zf = forecast;
    for (size_t c = 0; c < obs.size(); ++c) {
        const auto& ch = context.values[obs[c]];
        double mean = 0.0;
        for (double v : ch) mean += v;
        mean /= static_cast<double>(ch.size());
        double sd = population_std(ch.data(), ch.size(), mean);
        if (sd < 1e-8) sd = 1e-8;
        for (double& v : zt[c]) v = (v - mean) / sd;
        for (double& v : zf[c]) v = (v - mean) / sd;
    }

    EvalReport r;
    r.gamma = gamma;
    r.pred_length = truth[0].size();
    r.mae = mae(zf, zt);
    r.soft_dtw = soft_dtw(zf, zt, gamma);
    FreqMetrics f = freq_metrics(zf, zt);
    r.freq_cos_sim = f.cos_sim;
    r.freq_eucl = f.eucl;
    LatentMetrics lm = latent_metrics(zf, zt, patch_length);
    r.latent_cos_sim = lm.cos_sim;
    r.latent_eucl = lm.eucl;
    r.embed_size = lm.embed_size;
    r.final_score = final_score(r.mae, r.soft_dtw, r.freq_cos_sim, r.freq_eucl,
                                r.latent_cos_sim, r.latent_eucl, r.pred_length, r.embed_size);
    return r;
}

std::vector<std::vector<double>> naive_forecast(const MultivariateSeries& context, size_t H) {
    if (context.length() == 0) throw InputError("naive_forecast: empty context");
    if (H < 1) throw InputError("naive_forecast: horizon must be >= 1");
    std::vector<std::vector<double>> out;
    for (size_t ch : context.obs_indices()) {
        const auto& v = context.values[ch];
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        out.emplace_back(H, mean);
    }
    return out;
}

std::vector<std::vector<double>> seasonal_naive_forecast(const MultivariateSeries& context,
                                                         size_t H) {
    const size_t L = context.length();
    if (L < 4) throw InputError("seasonal_naive_forecast: context too short");
    if (H < 1) throw InputError("seasonal_naive_forecast: horizon must be >= 1");
    const auto obs = context.obs_indices();

    // dominant period: argmax of the mean-removed autocorrelation summed over
    // observation channels, smallest lag on ties
    std::vector<double> means;
    for (size_t ch : obs) {
        double mean = 0.0;
        for (double x : context.values[ch]) mean += x;
        means.push_back(mean / static_cast<double>(L));
    }
    size_t best_lag = 2;
    double best = -std::numeric_limits<double>::infinity();
    for (size_t lag = 2; lag <= L / 2; ++lag) {
        double r = 0.0;
        for (size_t c = 0; c < obs.size(); ++c) {
            const auto& v = context.values[obs[c]];
            for (size_t t = 0; t + lag < L; ++t) r += (v[t] - means[c]) * (v[t + lag] - means[c]);
        }
        if (r > best) {
            best = r;
            best_lag = lag;
        }
    }

    std::vector<std::vector<double>> out;
    for (size_t ch : obs) {
        const auto& v = context.values[ch];
        std::vector<double> f(H);
        for (size_t i = 0; i < H; ++i) f[i] = v[L - best_lag + (i % best_lag)];
        out.push_back(std::move(f));
    }
    return out;
}

}  // namespace chaosforge
