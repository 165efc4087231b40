#pragma once
#include <string>
#include <vector>

#include "chaosforge/errors.hpp"

namespace chaosforge {

enum class Role { observation, action };

struct MultivariateSeries {
    std::vector<std::string> channel_names;
    std::vector<Role> roles;
    std::vector<std::vector<double>> values;  // C channels x T samples
    double dt = 1.0;

    size_t channels() const { return values.size(); }
    size_t length() const { return values.empty() ? 0 : values[0].size(); }
    std::vector<size_t> obs_indices() const;
    std::vector<size_t> act_indices() const;
    // throws InputError on shape/NaN violations; action-only series pass
    // only when require_observation is false
    void validate(bool require_observation = true) const;
};

struct PatchGrid {
    size_t patch_length = 0;
    size_t origin_offset = 0;
    size_t num_patches = 0;  // L
    std::vector<std::string> channel_names;
    std::vector<Role> roles;
    std::vector<std::vector<double>> patches;  // per channel, L*P values

    const double* patch(size_t ch, size_t l) const {
        return patches[ch].data() + l * patch_length;
    }
    std::vector<size_t> obs_indices() const;
    std::vector<size_t> act_indices() const;
};

struct EmbeddingMatrix {
    size_t dim = 0;   // D
    size_t rows = 0;  // L
    std::vector<double> data;  // rows x dim, row-major
    std::string provider_id;

    const double* row(size_t r) const { return data.data() + r * dim; }
    double at(size_t r, size_t c) const { return data[r * dim + c]; }
};

struct EventRecord {
    long start_index = 0;
    long duration = 0;
    double magnitude = 0.0;
};

struct ChannelStats {
    double mean = 0.0;
    double stddev = 1.0;  // population, floored at 1e-8
};

double population_std(const double* x, size_t n, double mean);

std::vector<ChannelStats> context_stats(const MultivariateSeries& s, size_t context_len);
MultivariateSeries znorm_context(const MultivariateSeries& s, size_t context_len,
                                 std::vector<ChannelStats>* stats_out = nullptr);

PatchGrid patchify(const MultivariateSeries& s, size_t P);
std::vector<std::vector<double>> unpatchify(const PatchGrid& g);

// per patch, per observation channel: z-normalized values followed by the
// real-DFT magnitude spectrum of those values; channels concatenated
EmbeddingMatrix embed_patches(const PatchGrid& g);

std::vector<double> events_to_step(const std::vector<EventRecord>& events, size_t T);

}  // namespace chaosforge
