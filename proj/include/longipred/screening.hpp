#pragma once

#include <string>
#include <vector>

#include "longipred/dataset.hpp"

namespace longipred {

enum class ScreenMode { abs_correlation, p_value };

struct FeatureScore {
    double rho = std::numeric_limits<double>::quiet_NaN();
    double p_value = std::numeric_limits<double>::quiet_NaN();
    Index n_pairs = 0;
    bool rankable = false;
    std::string note;  // set when the feature was excluded from ranking
};

/// Block-diagonal selection of q feature columns plus the always-kept covariates.
struct SelectionMask {
    std::vector<Index> selected_features;    // ordered by rank
    std::vector<Index> selected_covariates;  // ordered as given
    std::vector<FeatureScore> scores;        // one per original feature
    double threshold_used = 0.0;             // score of the last feature admitted
    int q = 0;
    ScreenMode mode = ScreenMode::abs_correlation;
};

/// Ranks features by the strength of their pooled association with the
/// outcome, using rows where both are observed, and keeps the top q.
/// Covariates listed in always_include_covariates are always part of the model.
SelectionMask screen_features(const LongitudinalDataset& train, int q,
                              std::vector<Index> always_include_covariates,
                              ScreenMode mode = ScreenMode::abs_correlation);

/// Restricts a dataset to the masked features and covariates; rows unchanged.
LongitudinalDataset apply_mask(const LongitudinalDataset& ds, const SelectionMask& mask);

/// Per-feature centering/scaling learned from observed training cells and
/// applied identically to train and test rows.
struct FeatureScaler {
    Vector mean;
    Vector sd;

    static FeatureScaler fit(const LongitudinalDataset& train);
    LongitudinalDataset transform(const LongitudinalDataset& ds) const;
    bool empty() const { return mean.size() == 0; }
};

}  // namespace longipred
