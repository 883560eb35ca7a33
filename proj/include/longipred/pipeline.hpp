#pragma once

#include <optional>
#include <string>
#include <vector>

#include "longipred/evaluation.hpp"
#include "longipred/mice.hpp"

namespace longipred {

/// Everything needed for one train -> model -> predict pass; shared by the
/// single-split run, the bootstrap harness and LOOCV.
struct ModelSettings {
    ImputationConfig imputation;  // its seed field is ignored; seeds are derived per stage
    int q = 4;
    ScreenMode screen_mode = ScreenMode::abs_correlation;
    bool standardize = true;
    GeeOptions gee;
    double ci_level = 0.95;
    std::optional<int> ci_df;  // defaults to M - 1
    bool rubin_variant = false;
    bool fine_tune = true;
    bool exclude_tuning_day = true;
    std::optional<std::pair<double, double>> clamp;
};

struct TrainedModel {
    EnsembleModel model;
    ImputedSet imputed;  // kept for artifact emission and composition checks
    std::vector<std::string> warnings;
};

/// Screens features on the observed training rows, imputes the training set
/// M times, fits one GEE per completed copy on standardized selected columns,
/// and pools. Test data never enter here.
TrainedModel train_model(const LongitudinalDataset& train, const ModelSettings& settings,
                         Seed seed);

/// Pools parameters over already-fitted per-imputation GEEs (for composing
/// from persisted artifacts); mask/scaler must match how the fits were made.
EnsembleModel assemble_model(std::vector<GeeFit> fits, const SelectionMask& mask,
                             const FeatureScaler& scaler,
                             const std::vector<std::string>& all_feature_names,
                             const ModelSettings& settings, std::vector<std::string>* warnings);

/// Raw + optionally fine-tuned forecasts for every test subject.
std::vector<SubjectForecast> predict_dataset(const EnsembleModel& model,
                                             const LongitudinalDataset& test,
                                             const ModelSettings& settings);

/// Fits the M per-imputation GEEs for already-imputed training data.
std::vector<GeeFit> fit_imputations(const ImputedSet& imputed, const SelectionMask& mask,
                                    const FeatureScaler& scaler, const ModelSettings& settings,
                                    std::vector<std::string>* warnings);

struct EvaluationReport {
    MetricSet raw_longitudinal;
    MetricSet raw_subject_mean;
    std::optional<MetricSet> adjusted_longitudinal;
    std::optional<MetricSet> adjusted_subject_mean;
    std::optional<double> rmcorr_raw;
    std::optional<double> rmcorr_adjusted;
    ChangeGroups changes_raw;
    std::optional<ChangeGroups> changes_adjusted;
    std::vector<std::string> warnings;
};

/// Metric battery over a set of forecasts: longitudinal and per-subject-mean
/// metrics, endpoint rmcorr, and tau-thresholded change groups.
EvaluationReport evaluate_forecasts(const std::vector<SubjectForecast>& forecasts,
                                    const ModelSettings& settings, double tau);

/// Per-subject (observed, predicted) endpoint pairs for the rmcorr analysis:
/// baseline and end-of-study values for each subject carrying both.
std::vector<std::vector<std::pair<double, double>>> endpoint_pairs(
    const std::vector<SubjectForecast>& forecasts, MetricVariant variant);

}  // namespace longipred
