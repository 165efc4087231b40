#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "chaosforge/series.hpp"

namespace chaosforge {

// latent state fit over embedding rows: k-means states with Gaussian stats
// and a medoid row per state
struct StateFit {
    size_t k = 0;
    size_t dim = 0;
    std::vector<size_t> assignments;    // per row
    std::vector<double> mu;             // k x D, original embedding units
    std::vector<double> mu_std;         // k x D, standardized units
    std::vector<double> sigma;          // k x D, per-dim population std
    std::vector<size_t> medoids;        // row index per state
    std::vector<double> feature_means;  // D
    std::vector<double> feature_stds;   // D
};

StateFit fit_states(const EmbeddingMatrix& latents, uint64_t seed);

struct TransitionStats {
    std::vector<std::vector<size_t>> counts;  // k x k
    std::vector<std::vector<double>> probs;   // k x k, row-stochastic
};

TransitionStats transition_matrix(const std::vector<size_t>& seq, size_t k,
                                  double eps = 1e-6);
TransitionStats transition_matrix(const std::vector<size_t>& seq);

struct TransitionModel {
    size_t k = 0;
    size_t dim = 0;           // embedding D
    size_t patch_length = 0;  // P
    std::string provider_id;
    uint64_t seed = 0;
    double beta = 1.0;

    std::vector<double> mu;      // k x D, original units
    std::vector<double> mu_std;  // k x D, standardized
    std::vector<double> sigma;   // k x D
    std::vector<double> embed_mean, embed_std;              // D
    std::vector<std::vector<std::vector<double>>> medoids;  // k x nobs x P raw patches
    std::vector<std::string> obs_names, act_names;

    std::vector<std::vector<size_t>> counts;
    std::vector<std::vector<double>> probs;
    std::vector<size_t> state_sequence;  // context patch states

    // action table: key = standardized embedding row ‖ beta-scaled action
    // vector (z-normed per action channel on the context), value = next state
    std::vector<double> action_keys;  // records x (D + action_dim)
    std::vector<size_t> action_next;
    size_t action_dim = 0;
    std::vector<ChannelStats> action_stats;  // per action channel
    std::vector<double> last_action;         // scaled, from the final context patch
    bool single_action = false;              // all context action vectors identical

    size_t records() const { return action_next.size(); }
};

TransitionModel fit_transition_model(const MultivariateSeries& context, size_t patch_length,
                                     double beta, uint64_t seed);

enum class ForecastMode { argmax, sample };

struct LatentForecast {
    std::vector<size_t> state_path;
    std::vector<std::vector<double>> latents;  // H x D
    std::vector<std::vector<double>> decoded;  // nobs x H*P
    ForecastMode mode = ForecastMode::argmax;
    bool fallback = false;  // action conditioning requested but table empty
};

LatentForecast forecast_latent(const TransitionModel& m, size_t start_state, size_t horizon,
                               ForecastMode mode, uint64_t seed);

// future_action_patches: raw per-patch action blocks (channels concatenated,
// act channel order, P values each); the first forecast transition is keyed
// by the final context action patch, later ones by future patch f-1
LatentForecast action_conditioned_forecast(
    const TransitionModel& m, size_t start_state,
    const std::vector<std::vector<double>>& future_action_patches, size_t horizon,
    ForecastMode mode, uint64_t seed);

double energy(const TransitionModel& m, size_t i, size_t j);

std::string model_to_json(const TransitionModel& m);
TransitionModel model_from_json(const std::string& text);

}  // namespace chaosforge
