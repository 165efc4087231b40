#include "chaosforge/transition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "json.hpp"

#include "chaosforge/clustering.hpp"
#include "chaosforge/errors.hpp"
#include "chaosforge/rng.hpp"

namespace chaosforge {

StateFit fit_states(const EmbeddingMatrix& latents, uint64_t seed) {
    const size_t L = latents.rows;
    const size_t D = latents.dim;
    if (L < 2) throw InputError("fit_states: need at least 2 latent rows");

    StateFit fs;
    fs.dim = D;

    bool identical = true;
    for (size_t r = 1; r < L && identical; ++r)
        for (size_t c = 0; c < D; ++c)
            if (latents.at(r, c) != latents.at(0, c)) {
                identical = false;
                break;
            }
    if (identical) {
        fs.k = 1;
        fs.assignments.assign(L, 0);
        fs.mu.assign(latents.row(0), latents.row(0) + D);
        fs.mu_std.assign(D, 0.0);
        fs.sigma.assign(D, 0.0);
        fs.medoids = {0};
        fs.feature_means = fs.mu;
        fs.feature_stds.assign(D, 1.0);
        return fs;
    }

    const size_t kmax = std::min(
        {size_t{16},
         std::max<size_t>(2, static_cast<size_t>(std::llround(2.0 * std::log(static_cast<double>(L))))),
         L});
    Rng rng(seed);
    std::vector<KMeansFit> fits;
    std::vector<double> inertias;
    for (size_t k = 2; k <= kmax; ++k) {
        uint64_t s = rng.fork("states:k" + std::to_string(k)).base_seed();
        fits.push_back(fit_kmeans(latents.data, L, D, k, s));
        inertias.push_back(fits.back().inertia);
    }
    size_t chosen;
    if (inertias.size() < 3)
        chosen = 0;  // smallest candidate
    else
        chosen = elbow_k(inertias) - 1;  // position -> candidate offset
    const KMeansFit& fit = fits[chosen];

    fs.k = fit.k;
    fs.assignments = fit.assignments;
    fs.mu = fit.centroids;
    fs.mu_std = fit.centroids_std;
    fs.feature_means = fit.feature_means;
    fs.feature_stds = fit.feature_stds;

    fs.sigma.assign(fs.k * D, 0.0);
    std::vector<size_t> counts(fs.k, 0);
    for (size_t r = 0; r < L; ++r) ++counts[fs.assignments[r]];
    for (size_t r = 0; r < L; ++r) {
        size_t j = fs.assignments[r];
        for (size_t c = 0; c < D; ++c) {
            double diff = latents.at(r, c) - fs.mu[j * D + c];
            fs.sigma[j * D + c] += diff * diff;
        }
    }
    for (size_t j = 0; j < fs.k; ++j)
        for (size_t c = 0; c < D; ++c)
            fs.sigma[j * D + c] = std::sqrt(fs.sigma[j * D + c] / static_cast<double>(counts[j]));

    // medoid = member nearest its centroid in standardized space, earliest on ties
    fs.medoids.assign(fs.k, 0);
    std::vector<double> best(fs.k, std::numeric_limits<double>::infinity());
    for (size_t r = 0; r < L; ++r) {
        size_t j = fs.assignments[r];
        double d2 = 0.0;
        for (size_t c = 0; c < D; ++c) {
            double z = (latents.at(r, c) - fs.feature_means[c]) / fs.feature_stds[c];
            double diff = z - fs.mu_std[j * D + c];
            d2 += diff * diff;
        }
        if (d2 < best[j]) {
            best[j] = d2;
            fs.medoids[j] = r;
        }
    }
    return fs;
}

TransitionStats transition_matrix(const std::vector<size_t>& seq, size_t k, double eps) {
    if (seq.size() < 2) throw InputError("transition_matrix: need at least 2 states");
    if (k == 0) throw InputError("transition_matrix: k must be positive");
    TransitionStats ts;
    ts.counts.assign(k, std::vector<size_t>(k, 0));
    for (size_t t = 0; t + 1 < seq.size(); ++t) {
        if (seq[t] >= k || seq[t + 1] >= k)
            throw InputError("transition_matrix: state out of range");
        ++ts.counts[seq[t]][seq[t + 1]];
    }
    ts.probs.assign(k, std::vector<double>(k, 0.0));
    for (size_t i = 0; i < k; ++i) {
        double row = 0.0;
        for (size_t j = 0; j < k; ++j) row += static_cast<double>(ts.counts[i][j]);
        double denom = row + static_cast<double>(k) * eps;
        for (size_t j = 0; j < k; ++j)
            ts.probs[i][j] = (static_cast<double>(ts.counts[i][j]) + eps) / denom;
    }
    return ts;
}

TransitionStats transition_matrix(const std::vector<size_t>& seq) {
    if (seq.empty()) throw InputError("transition_matrix: empty sequence");
    size_t k = *std::max_element(seq.begin(), seq.end()) + 1;
    return transition_matrix(seq, k);
}

TransitionModel fit_transition_model(const MultivariateSeries& context, size_t patch_length,
                                     double beta, uint64_t seed) {
    PatchGrid grid = patchify(context, patch_length);
    EmbeddingMatrix emb = embed_patches(grid);
    StateFit fs = fit_states(emb, seed);

    TransitionModel m;
    m.k = fs.k;
    m.dim = fs.dim;
    m.patch_length = patch_length;
    m.provider_id = emb.provider_id;
    m.seed = seed;
    m.beta = beta;
    m.mu = fs.mu;
    m.mu_std = fs.mu_std;
    m.sigma = fs.sigma;
    m.embed_mean = fs.feature_means;
    m.embed_std = fs.feature_stds;
    m.state_sequence = fs.assignments;

    const auto obs = grid.obs_indices();
    const auto act = grid.act_indices();
    for (size_t ch : obs) m.obs_names.push_back(grid.channel_names[ch]);
    for (size_t ch : act) m.act_names.push_back(grid.channel_names[ch]);
    m.medoids.resize(m.k);
    for (size_t j = 0; j < m.k; ++j) {
        size_t row = fs.medoids[j];
        for (size_t ch : obs) {
            const double* p = grid.patch(ch, row);
            m.medoids[j].emplace_back(p, p + patch_length);
        }
    }

    if (m.state_sequence.size() >= 2) {
        TransitionStats ts = transition_matrix(m.state_sequence, m.k);
        m.counts = std::move(ts.counts);
        m.probs = std::move(ts.probs);
    } else {
        m.counts.assign(m.k, std::vector<size_t>(m.k, 0));
        m.probs.assign(m.k, std::vector<double>(m.k, 1.0 / static_cast<double>(m.k)));
    }

    // action table over context transitions
    const size_t L = grid.num_patches;
    const size_t P = patch_length;
    if (!act.empty() && L >= 2) {
        m.action_dim = act.size() * P;
        for (size_t ch : act) {
            const auto& v = grid.patches[ch];
            double mean = 0.0;
            for (double x : v) mean += x;
            mean /= static_cast<double>(v.size());
            double sd = population_std(v.data(), v.size(), mean);
            m.action_stats.push_back({mean, sd < 1e-8 ? 1e-8 : sd});
        }
        auto action_vec = [&](size_t l) {
            std::vector<double> a;
            a.reserve(m.action_dim);
            for (size_t c = 0; c < act.size(); ++c) {
                const double* p = grid.patch(act[c], l);
                for (size_t i = 0; i < P; ++i)
                    a.push_back(beta * (p[i] - m.action_stats[c].mean) / m.action_stats[c].stddev);
            }
            return a;
        };
        std::vector<std::vector<double>> avecs(L);
        for (size_t l = 0; l < L; ++l) avecs[l] = action_vec(l);
        m.single_action = true;
        for (size_t l = 1; l < L && m.single_action; ++l)
            if (avecs[l] != avecs[0]) m.single_action = false;
        m.last_action = avecs[L - 1];

        const size_t key_dim = m.dim + m.action_dim;
        m.action_keys.reserve((L - 1) * key_dim);
        for (size_t t = 0; t + 1 < L; ++t) {
            for (size_t c = 0; c < m.dim; ++c)
                m.action_keys.push_back((emb.at(t, c) - m.embed_mean[c]) / m.embed_std[c]);
            m.action_keys.insert(m.action_keys.end(), avecs[t].begin(), avecs[t].end());
            m.action_next.push_back(m.state_sequence[t + 1]);
        }
    }
    return m;
}

namespace {

size_t pick_state(const std::vector<double>& row, ForecastMode mode, Rng& rng) {
    if (mode == ForecastMode::argmax) {
        size_t best = 0;
        for (size_t j = 1; j < row.size(); ++j)
            if (row[j] > row[best]) best = j;
        return best;
    }
    return rng.categorical(row);
}

void emit_step(const TransitionModel& m, size_t state, ForecastMode mode, Rng& rng,
               LatentForecast& out) {
    out.state_path.push_back(state);
    std::vector<double> latent(m.dim);
    for (size_t c = 0; c < m.dim; ++c) {
        double v = m.mu[state * m.dim + c];
        if (mode == ForecastMode::sample) v += m.sigma[state * m.dim + c] * rng.gaussian();
        latent[c] = v;
    }
    out.latents.push_back(std::move(latent));
    for (size_t ch = 0; ch < m.medoids[state].size(); ++ch) {
        const auto& patch = m.medoids[state][ch];
        out.decoded[ch].insert(out.decoded[ch].end(), patch.begin(), patch.end());
    }
}

}  // namespace

LatentForecast forecast_latent(const TransitionModel& m, size_t start_state, size_t horizon,
                               ForecastMode mode, uint64_t seed) {
    if (start_state >= m.k) throw InputError("forecast_latent: start state out of range");
    if (horizon < 1) throw InputError("forecast_latent: horizon must be >= 1");
    LatentForecast out;
    out.mode = mode;
    out.decoded.resize(m.obs_names.size());
    Rng rng(seed);
    size_t cur = start_state;
    for (size_t h = 0; h < horizon; ++h) {
        size_t next = pick_state(m.probs[cur], mode, rng);
        emit_step(m, next, mode, rng, out);
        cur = next;
    }
    return out;
}

LatentForecast action_conditioned_forecast(
    const TransitionModel& m, size_t start_state,
    const std::vector<std::vector<double>>& future_action_patches, size_t horizon,
    ForecastMode mode, uint64_t seed) {
    if (start_state >= m.k) throw InputError("action_conditioned_forecast: start state out of range");
    if (horizon < 1) throw InputError("action_conditioned_forecast: horizon must be >= 1");
    if (m.records() == 0) {
        LatentForecast out = forecast_latent(m, start_state, horizon, mode, seed);
        out.fallback = true;
        return out;
    }
    if (horizon > 1 && future_action_patches.size() < horizon - 1)
        throw InputError("action_conditioned_forecast: need at least horizon-1 future action patches");

    const size_t P = m.patch_length;
    const size_t n_act = m.act_names.size();
    auto scale_patch = [&](const std::vector<double>& raw) {
        if (raw.size() != n_act * P)
            throw InputError("action_conditioned_forecast: bad action patch size");
        std::vector<double> a(raw.size());
        for (size_t c = 0; c < n_act; ++c)
            for (size_t i = 0; i < P; ++i)
                a[c * P + i] =
                    m.beta * (raw[c * P + i] - m.action_stats[c].mean) / m.action_stats[c].stddev;
        return a;
    };

    const size_t key_dim = m.dim + m.action_dim;
    const size_t nrec = m.records();
    const size_t neighbors =
        std::max<size_t>(1, static_cast<size_t>(std::llround(std::sqrt(static_cast<double>(nrec)))));

    LatentForecast out;
    out.mode = mode;
    out.decoded.resize(m.obs_names.size());
    Rng rng(seed);
    size_t cur = start_state;
    std::vector<double> query(key_dim);
    std::vector<std::pair<double, size_t>> order(nrec);
    for (size_t h = 0; h < horizon; ++h) {
        std::vector<double> row = m.probs[cur];
        if (!m.single_action) {
            const std::vector<double>& a =
                h == 0 ? m.last_action : scale_patch(future_action_patches[h - 1]);
            for (size_t c = 0; c < m.dim; ++c) query[c] = m.mu_std[cur * m.dim + c];
            std::copy(a.begin(), a.end(), query.begin() + m.dim);
            for (size_t r = 0; r < nrec; ++r) {
                const double* key = m.action_keys.data() + r * key_dim;
                double d2 = 0.0;
                for (size_t c = 0; c < key_dim; ++c) {
                    double diff = query[c] - key[c];
                    d2 += diff * diff;
                }
                order[r] = {d2, r};
            }
            std::partial_sort(order.begin(), order.begin() + neighbors, order.end());
            std::vector<char> allowed(m.k, 0);
            for (size_t r = 0; r < neighbors; ++r) allowed[m.action_next[order[r].second]] = 1;
            double total = 0.0;
            for (size_t j = 0; j < m.k; ++j) {
                if (!allowed[j]) row[j] = 0.0;
                total += row[j];
            }
            for (double& p : row) p /= total;
        }
        size_t next = pick_state(row, mode, rng);
        emit_step(m, next, mode, rng, out);
        cur = next;
    }
    return out;
}

double energy(const TransitionModel& m, size_t i, size_t j) {
    if (i >= m.k || j >= m.k) throw InputError("energy: state index out of range");
    return -std::log(m.probs[i][j]);
}

using nlohmann::json;

std::string model_to_json(const TransitionModel& m) {
    json j;
    j["k"] = m.k;
    j["dim"] = m.dim;
    j["patch_length"] = m.patch_length;
    j["provider_id"] = m.provider_id;
    j["seed"] = m.seed;
    j["beta"] = m.beta;
    j["mu"] = m.mu;
    j["mu_std"] = m.mu_std;
    j["sigma"] = m.sigma;
    j["embed_mean"] = m.embed_mean;
    j["embed_std"] = m.embed_std;
    j["medoids"] = m.medoids;
    j["obs_names"] = m.obs_names;
    j["act_names"] = m.act_names;
    j["counts"] = m.counts;
    j["probs"] = m.probs;
    j["state_sequence"] = m.state_sequence;
    j["action_keys"] = m.action_keys;
    j["action_next"] = m.action_next;
    j["action_dim"] = m.action_dim;
    json stats = json::array();
    for (const auto& s : m.action_stats) stats.push_back({s.mean, s.stddev});
    j["action_stats"] = stats;
    j["last_action"] = m.last_action;
    j["single_action"] = m.single_action;
    return j.dump(2);
}

TransitionModel model_from_json(const std::string& text) {
    json j = json::parse(text);
    TransitionModel m;
    m.k = j.at("k").get<size_t>();
    m.dim = j.at("dim").get<size_t>();
    m.patch_length = j.at("patch_length").get<size_t>();
    m.provider_id = j.at("provider_id").get<std::string>();
    m.seed = j.at("seed").get<uint64_t>();
    m.beta = j.at("beta").get<double>();
    m.mu = j.at("mu").get<std::vector<double>>();
    m.mu_std = j.at("mu_std").get<std::vector<double>>();
    m.sigma = j.at("sigma").get<std::vector<double>>();
    m.embed_mean = j.at("embed_mean").get<std::vector<double>>();
    m.embed_std = j.at("embed_std").get<std::vector<double>>();
    m.medoids = j.at("medoids").get<std::vector<std::vector<std::vector<double>>>>();
    m.obs_names = j.at("obs_names").get<std::vector<std::string>>();
    m.act_names = j.at("act_names").get<std::vector<std::string>>();
    m.counts = j.at("counts").get<std::vector<std::vector<size_t>>>();
    m.probs = j.at("probs").get<std::vector<std::vector<double>>>();
    m.state_sequence = j.at("state_sequence").get<std::vector<size_t>>();
    m.action_keys = j.at("action_keys").get<std::vector<double>>();
    m.action_next = j.at("action_next").get<std::vector<size_t>>();
    m.action_dim = j.at("action_dim").get<size_t>();
    for (const auto& s : j.at("action_stats")) m.action_stats.push_back({s[0], s[1]});
    m.last_action = j.at("last_action").get<std::vector<double>>();
    m.single_action = j.at("single_action").get<bool>();
    return m;
}

}  // namespace chaosforge
