#include "chaosforge/series.hpp"

#include <algorithm>
#include <cmath>

#include "chaosforge/dft.hpp"

namespace chaosforge {

std::vector<size_t> MultivariateSeries::obs_indices() const {
    std::vector<size_t> out;
    for (size_t c = 0; c < roles.size(); ++c)
        if (roles[c] == Role::observation) out.push_back(c);
    return out;
}

std::vector<size_t> MultivariateSeries::act_indices() const {
    std::vector<size_t> out;
    for (size_t c = 0; c < roles.size(); ++c)
        if (roles[c] == Role::action) out.push_back(c);
    return out;
}

void MultivariateSeries::validate(bool require_observation) const {
    if (values.empty()) throw InputError("series has no channels");
    if (channel_names.size() != values.size() || roles.size() != values.size())
        throw InputError("channel metadata length mismatch");
    const size_t T = values[0].size();
    if (T == 0) throw InputError("series has zero length");
    bool has_obs = false;
    for (size_t c = 0; c < values.size(); ++c) {
        if (values[c].size() != T) throw InputError("channel length mismatch");
        if (roles[c] == Role::observation) has_obs = true;
        for (double v : values[c])
            if (!std::isfinite(v)) throw InputError("non-finite value in channel " + channel_names[c]);
    }
    if (require_observation && !has_obs)
        throw InputError("series has no observation channel");
}

std::vector<size_t> PatchGrid::obs_indices() const {
    std::vector<size_t> out;
    for (size_t c = 0; c < roles.size(); ++c)
        if (roles[c] == Role::observation) out.push_back(c);
    return out;
}

std::vector<size_t> PatchGrid::act_indices() const {
    std::vector<size_t> out;
    for (size_t c = 0; c < roles.size(); ++c)
        if (roles[c] == Role::action) out.push_back(c);
    return out;
}

double population_std(const double* x, size_t n, double mean) {
    double acc = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double d = x[i] - mean;
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(n));
}

std::vector<ChannelStats> context_stats(const MultivariateSeries& s, size_t context_len) {
    if (context_len < 1 || context_len > s.length())
        throw InputError("context length out of range");
    std::vector<ChannelStats> out(s.channels());
    for (size_t c = 0; c < s.channels(); ++c) {
        const double* x = s.values[c].data();
        double mean = 0.0;
        for (size_t i = 0; i < context_len; ++i) mean += x[i];
        mean /= static_cast<double>(context_len);
        double sd = population_std(x, context_len, mean);
        out[c] = {mean, std::max(sd, 1e-8)};
    }
    return out;
}

MultivariateSeries znorm_context(const MultivariateSeries& s, size_t context_len,
                                 std::vector<ChannelStats>* stats_out) {
    auto stats = context_stats(s, context_len);
    MultivariateSeries out = s;
    for (size_t c = 0; c < s.channels(); ++c)
        for (double& v : out.values[c]) v = (v - stats[c].mean) / stats[c].stddev;
    if (stats_out) *stats_out = std::move(stats);
    return out;
}

PatchGrid patchify(const MultivariateSeries& s, size_t P) {
    if (P < 2) throw InputError("patch length must be >= 2");
    const size_t T = s.length();
    if (T < P) throw InputError("series shorter than one patch");
    PatchGrid g;
    g.patch_length = P;
    g.origin_offset = T % P;
    g.num_patches = (T - g.origin_offset) / P;
    g.channel_names = s.channel_names;
    g.roles = s.roles;
    g.patches.resize(s.channels());
    for (size_t c = 0; c < s.channels(); ++c) {
        g.patches[c].assign(s.values[c].begin() + static_cast<long>(g.origin_offset),
                            s.values[c].end());
    }
    return g;
}

std::vector<std::vector<double>> unpatchify(const PatchGrid& g) {
    return g.patches;
}

EmbeddingMatrix embed_patches(const PatchGrid& g) {
    const size_t P = g.patch_length;
    const auto obs = g.obs_indices();
    const size_t bins = P / 2 + 1;
    EmbeddingMatrix m;
    m.provider_id = "znorm_rdft_v1";
    m.rows = g.num_patches;
    m.dim = obs.size() * (P + bins);
    m.data.assign(m.rows * m.dim, 0.0);
    std::vector<double> z(P);
    for (size_t l = 0; l < g.num_patches; ++l) {
        double* row = m.data.data() + l * m.dim;
        size_t off = 0;
        for (size_t c : obs) {
            const double* p = g.patch(c, l);
            double mean = 0.0;
            for (size_t i = 0; i < P; ++i) mean += p[i];
            mean /= static_cast<double>(P);
            double sd = std::max(population_std(p, P, mean), 1e-8);
            for (size_t i = 0; i < P; ++i) z[i] = (p[i] - mean) / sd;
            for (size_t i = 0; i < P; ++i) row[off + i] = z[i];
            auto spec = rdft_magnitude(z.data(), P);
            for (size_t i = 0; i < bins; ++i) row[off + P + i] = spec[i];
            off += P + bins;
        }
    }
    return m;
}

std::vector<double> events_to_step(const std::vector<EventRecord>& events, size_t T) {
    std::vector<double> out(T, 0.0);
    for (const auto& e : events) {
        if (e.start_index < 0 || e.duration < 1 ||
            static_cast<size_t>(e.start_index + e.duration) > T)
            throw InputError("event outside series bounds");
        for (long i = e.start_index; i < e.start_index + e.duration; ++i)
            out[static_cast<size_t>(i)] += e.magnitude;
    }
    return out;
}

}  // namespace chaosforge
