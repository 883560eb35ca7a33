#pragma once

#include <utility>
#include <vector>

#include "longipred/dataset.hpp"

namespace longipred {

/// Knobs for the ground-truth longitudinal generator. Signal features come
/// first, then pure-noise features; covariates are an age-like continuous
/// column and a binary sex-like column (coefficients sized accordingly).
struct GeneratorConfig {
    int n_subjects = 40;
    std::pair<int, int> t_range{1, 10};
    int p_signal = 4;
    int p_noise = 4;
    double true_intercept = 40.0;
    Vector true_feature_coefs;    // length p_signal
    Vector true_covariate_coefs;  // one per covariate
    double subject_intercept_sd = 0.0;
    double within_correlation = 0.0;  // exchangeable alpha of the noise
    double noise_sd = 1.0;
    double missing_rate = 0.0;
    Seed seed = 0;

    void validate() const;

    static GeneratorConfig defaults();
};

struct GroundTruth {
    GeneratorConfig config;
    LongitudinalDataset complete;  // before masking
    Vector subject_intercepts;
    /// Exchangeable correlation the combined error (subject intercept plus
    /// correlated noise) actually carries.
    double marginal_alpha = 0.0;
    std::vector<std::string> trend_subjects;
    double trend_slope = 0.0;
};

/// Draws a longitudinal dataset: y_it = mu + x_it'a + z_i'g + b_i + e_it with
/// exchangeable within-subject noise, then masks cells under a MAR mechanism
/// whose missingness probability depends only on the (always observed) age
/// covariate. Returns the masked dataset plus the full ground truth.
std::pair<LongitudinalDataset, GroundTruth> generate(const GeneratorConfig& cfg);

/// Adds slope*t to the outcomes of a seeded subject subset, shifting the
/// signal features consistently so the mean structure still explains the
/// trend. The chosen subjects are recorded in the ground truth.
LongitudinalDataset inject_trend(const LongitudinalDataset& ds, GroundTruth& truth,
                                 double subject_fraction, double slope);

}  // namespace longipred
