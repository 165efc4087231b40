#pragma once
#include <cstddef>
#include <vector>

#include "chaosforge/series.hpp"

namespace chaosforge {

struct EvalReport {
    double mae = 0.0;
    double soft_dtw = 0.0;
    double freq_cos_sim = 0.0;
    double freq_eucl = 0.0;
    double latent_cos_sim = 0.0;
    double latent_eucl = 0.0;
    double final_score = 0.0;
    size_t pred_length = 0;
    size_t embed_size = 0;
    double gamma = 1.0;
};

double mae(const std::vector<double>& pred, const std::vector<double>& truth);
double mae(const std::vector<std::vector<double>>& pred,
           const std::vector<std::vector<double>>& truth);

// squared-difference local cost, soft-min by stable log-sum-exp; gamma = 0
// degenerates to classic DTW
double soft_dtw(const std::vector<double>& pred, const std::vector<double>& truth,
                double gamma);
double soft_dtw(const std::vector<std::vector<double>>& pred,
                const std::vector<std::vector<double>>& truth, double gamma);

struct FreqMetrics {
    double cos_sim = 0.0;
    double eucl = 0.0;
};

// real-DFT magnitude spectra including DC; zero spectra give cos = 0
FreqMetrics freq_metrics(const std::vector<double>& pred, const std::vector<double>& truth);
FreqMetrics freq_metrics(const std::vector<std::vector<double>>& pred,
                         const std::vector<std::vector<double>>& truth);

struct LatentMetrics {
    double cos_sim = 0.0;
    double eucl = 0.0;
    size_t embed_size = 0;
};

// embed both series with the patch provider, mean-pool rows, compare
LatentMetrics latent_metrics(const std::vector<std::vector<double>>& pred,
                             const std::vector<std::vector<double>>& truth,
                             size_t patch_length);

double final_score(double mae_v, double soft_dtw_v, double freq_cos, double freq_eucl,
                   double latent_cos, double latent_eucl, size_t pred_length,
                   size_t embed_size);

// full protocol: z-normalize truth and forecast with the context stats of the
// matching observation channels, then assemble all six metrics
EvalReport evaluate(const MultivariateSeries& context,
                    const std::vector<std::vector<double>>& truth,
                    const std::vector<std::vector<double>>& forecast, double gamma = 1.0,
                    size_t patch_length = 16);

// per-observation-channel constant mean forecast
std::vector<std::vector<double>> naive_forecast(const MultivariateSeries& context, size_t H);

// dominant-period tiling of the last p context samples
std::vector<std::vector<double>> seasonal_naive_forecast(const MultivariateSeries& context,
                                                         size_t H);

}  // namespace chaosforge
