#pragma once

#include <optional>
#include <string>
#include <vector>

#include "longipred/ensemble.hpp"

namespace longipred {

struct ForecastEntry {
    int time_index = 0;
    double y_hat_raw = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> y_hat_adjusted;
    std::optional<double> y_observed;
    bool skipped = false;
    std::string skip_reason;
};

/// All scored (or skipped) times for one test subject, sorted by time.
struct SubjectForecast {
    std::string subject_id;
    std::vector<ForecastEntry> entries;
    bool tuned = false;
    std::optional<int> tuning_time;
    std::string tuning_note;
};

/// Raw out-of-sample prediction for one subject. Only rows where every
/// selected feature and covariate is observed are scored; the rest are marked
/// skipped with reason "incomplete-observation". Test data are never imputed
/// and outcomes are not read here.
SubjectForecast predict_subject(const EnsembleModel& model, const LongitudinalDataset& test,
                                Index subject_index,
                                std::optional<std::pair<double, double>> clamp = std::nullopt);

/// Subject-level constant-offset correction from the first observed outcome:
/// the prediction at the tuning time stays raw, every other prediction gains
/// (y_k1 - yhat_k1). Throws nothing; if the tuning-time prediction is missing
/// the forecast comes back untuned with a note.
SubjectForecast fine_tune(SubjectForecast forecast, std::pair<int, double> first_observation);

/// Full test-set pass: raw predictions, optional fine-tuning from each
/// subject's earliest time with both an observed outcome and a scored
/// prediction, and observed outcomes attached for reporting.
std::vector<SubjectForecast> forecast_dataset(const EnsembleModel& model,
                                              const LongitudinalDataset& test, bool with_fine_tune,
                                              std::optional<std::pair<double, double>> clamp = std::nullopt);

}  // namespace longipred
