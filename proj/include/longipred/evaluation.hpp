#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "longipred/forecast.hpp"

namespace longipred {

enum class MetricVariant { raw, adjusted };
enum class Aggregation { longitudinal, per_subject_mean };

struct MetricSet {
    double pearson_r = std::numeric_limits<double>::quiet_NaN();
    double spearman_r = std::numeric_limits<double>::quiet_NaN();
    double mse = std::numeric_limits<double>::quiet_NaN();
    Index n_pairs = 0;
    MetricVariant variant = MetricVariant::raw;
    Aggregation aggregation = Aggregation::longitudinal;
    bool correlation_defined = false;
};

/// Pearson r, Spearman r (average-rank ties) and mean squared error over
/// (observed, predicted) pairs. A constant observed or predicted vector
/// leaves the correlations flagged undefined; the MSE is always computed.
MetricSet metrics(const std::vector<std::pair<double, double>>& pairs,
                  MetricVariant variant = MetricVariant::raw,
                  Aggregation aggregation = Aggregation::longitudinal);

/// Extracts (observed, predicted) pairs from forecasts. When
/// exclude_tuning_day is set, the point consumed for fine-tuning is dropped.
std::vector<std::pair<double, double>> forecast_pairs(const std::vector<SubjectForecast>& forecasts,
                                                      MetricVariant variant,
                                                      bool exclude_tuning_day);

/// One (mean observed, mean predicted) pair per subject, then metrics().
MetricSet per_subject_mean_metrics(const std::vector<SubjectForecast>& forecasts,
                                   MetricVariant variant, bool exclude_tuning_day);

/// Repeated-measures correlation: the common within-subject association after
/// removing per-subject levels. Each inner list holds one subject's
/// (observed, predicted) pairs; subjects with fewer than 2 pairs are excluded.
/// Returns nullopt when the within-subject covariate variance is zero.
std::optional<double> rmcorr(const std::vector<std::vector<std::pair<double, double>>>& pairs_by_subject);

enum class ChangeLabel { improved = 0, stable = 1, worsened = 2 };

ChangeLabel change_label(double delta, double tau);
std::string to_string(ChangeLabel label);

struct ChangeAssignment {
    std::string subject_id;
    double delta_observed = 0.0;
    double delta_predicted = 0.0;
    ChangeLabel observed = ChangeLabel::stable;
    ChangeLabel predicted = ChangeLabel::stable;
};

/// Improved / Stable / Worsened classification of observed and predicted
/// end-minus-baseline changes at threshold tau, with the 3x3 confusion counts
/// (rows = observed, columns = predicted).
struct ChangeGroups {
    double tau = 0.5;
    std::vector<ChangeAssignment> assignments;
    std::array<std::array<int, 3>, 3> confusion{};
    int excluded = 0;  // subjects lacking a scored baseline or end point
};

ChangeGroups classify_changes(const std::vector<SubjectForecast>& forecasts, double tau,
                              MetricVariant variant);

}  // namespace longipred
