#pragma once

#include <optional>
#include <string>
#include <vector>

#include "longipred/gee.hpp"
#include "longipred/screening.hpp"

namespace longipred {

struct CiEntry {
    std::string name;
    double estimate = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double level = 0.95;
};

/// Unified predictive model pooled from M per-imputation fits. The pooled
/// feature coefficients live in a vector of the original feature length with
/// zeros at unselected positions.
struct EnsembleModel {
    SelectionMask mask;
    FeatureScaler scaler;  // identity when standardization is off
    double pooled_intercept = 0.0;
    Vector pooled_feature_coefs;    // length = original p
    Vector pooled_covariate_coefs;  // over selected covariates
    std::vector<GeeFit> per_imputation_fits;
    std::vector<CiEntry> ci_table;
    Link link = Link::identity;
    std::vector<std::string> feature_names;    // all p, for embedding
    std::vector<std::string> covariate_names;  // selected covariates
};

/// Coordinate-wise mean of the M coefficient vectors, embedded back into the
/// original feature layout via the mask.
EnsembleModel pool_parameters(const std::vector<GeeFit>& fits, const SelectionMask& mask,
                              const std::vector<std::string>& all_feature_names);

/// Per-coefficient interval  mean +- t_{df, (1-level)/2} * s / sqrt(M)  with
/// s = sqrt(sum (b_m - mean)^2 / M).  With rubin_variant the half-width uses
/// the total-variance form  sqrt(within + (1 + 1/M) * between)  instead.
std::vector<CiEntry> pooled_ci(const std::vector<GeeFit>& fits, double level, int df,
                               bool rubin_variant = false);

/// Mean over the M fits of predict_mean on the same rows.
Vector average_predictions(const std::vector<GeeFit>& fits, const Matrix& rows);

/// Prediction from the pooled parameters for rows laid out as
/// [selected features | selected covariates] (already standardized).
Vector predict_pooled(const EnsembleModel& model, const Matrix& rows);

}  // namespace longipred
