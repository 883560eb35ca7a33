#include "longipred/forecast.hpp"

#include <algorithm>
#include <cmath>

namespace longipred {

namespace {

double apply_clamp(double v, const std::optional<std::pair<double, double>>& clamp) {
    if (!clamp) return v;
    return std::clamp(v, clamp->first, clamp->second);
}

}  // namespace

SubjectForecast predict_subject(const EnsembleModel& model, const LongitudinalDataset& test,
                                Index subject_index,
                                std::optional<std::pair<double, double>> clamp) {
    if (subject_index < 0 || subject_index >= test.n_subjects())
        throw IntegrityError("predict_subject: subject index out of range");
    const SubjectSpan& span = test.subjects()[static_cast<std::size_t>(subject_index)];
    const auto q = static_cast<Index>(model.mask.selected_features.size());
    const auto c = static_cast<Index>(model.mask.selected_covariates.size());
    for (Index col : model.mask.selected_features)
        if (col < 0 || col >= test.n_features())
            throw IntegrityError("predict_subject: mask feature index out of range");
    for (Index col : model.mask.selected_covariates)
        if (col < 0 || col >= test.n_covariates())
            throw IntegrityError("predict_subject: mask covariate index out of range");

    SubjectForecast fc;
    fc.subject_id = span.id;
    for (Index r = span.begin; r < span.begin + span.count; ++r) {
        ForecastEntry e;
        e.time_index = test.times()[static_cast<std::size_t>(r)];
        bool complete = true;
        Matrix row(1, q + c);
        for (Index k = 0; k < q && complete; ++k) {
            const Index col = model.mask.selected_features[static_cast<std::size_t>(k)];
            if (!test.observed()(r, col)) {
                complete = false;
                break;
            }
            double v = test.cells()(r, col);
            if (!model.scaler.empty()) v = (v - model.scaler.mean(col)) / model.scaler.sd(col);
            row(0, k) = v;
        }
        for (Index k = 0; k < c && complete; ++k) {
            const Index col = test.n_features() + model.mask.selected_covariates[static_cast<std::size_t>(k)];
            if (!test.observed()(r, col)) {
                complete = false;
                break;
            }
            row(0, k + q) = test.cells()(r, col);
        }
        if (!complete) {
            e.skipped = true;
            e.skip_reason = "incomplete-observation";
        } else {
            e.y_hat_raw = apply_clamp(predict_pooled(model, row)(0), clamp);
        }
        fc.entries.push_back(e);
    }
    return fc;
}

SubjectForecast fine_tune(SubjectForecast forecast, std::pair<int, double> first_observation) {
    const auto [t1, y1] = first_observation;
    const auto anchor = std::find_if(forecast.entries.begin(), forecast.entries.end(),
                                     [&](const ForecastEntry& e) { return e.time_index == t1; });
    if (anchor == forecast.entries.end() || anchor->skipped) {
        forecast.tuned = false;
        forecast.tuning_note = "untuned: first-day-incomplete";
        return forecast;
    }
    const double offset = y1 - anchor->y_hat_raw;
    for (ForecastEntry& e : forecast.entries) {
        if (e.skipped) continue;
        // Eq-style anchor: the tuning time keeps its raw value, everything
        // else shifts by the day-one residual.
        e.y_hat_adjusted = e.time_index == t1 ? e.y_hat_raw : e.y_hat_raw + offset;
    }
    forecast.tuned = true;
    forecast.tuning_time = t1;
    return forecast;
}

std::vector<SubjectForecast> forecast_dataset(const EnsembleModel& model,
                                              const LongitudinalDataset& test, bool with_fine_tune,
                                              std::optional<std::pair<double, double>> clamp) {
    std::vector<SubjectForecast> out;
    for (Index s = 0; s < test.n_subjects(); ++s) {
        SubjectForecast fc = predict_subject(model, test, s, clamp);
        const SubjectSpan& span = test.subjects()[static_cast<std::size_t>(s)];

        if (with_fine_tune) {
            // Earliest time with an observed outcome and a scored prediction.
            std::optional<std::pair<int, double>> first;
            for (Index r = span.begin; r < span.begin + span.count && !first; ++r) {
                if (!test.observed()(r, test.outcome_col())) continue;
                const int t = test.times()[static_cast<std::size_t>(r)];
                for (const ForecastEntry& e : fc.entries) {
                    if (e.time_index == t && !e.skipped) {
                        first = {t, test.cells()(r, test.outcome_col())};
                        break;
                    }
                }
            }
            if (first) {
                fc = fine_tune(std::move(fc), *first);
                if (clamp && fc.tuned)
                    for (ForecastEntry& e : fc.entries)
                        if (e.y_hat_adjusted) e.y_hat_adjusted = apply_clamp(*e.y_hat_adjusted, clamp);
            } else {
                fc.tuning_note = "untuned: first-day-incomplete";
            }
        }

        // Observed outcomes are attached only after all predictions are final.
        for (ForecastEntry& e : fc.entries) {
            for (Index r = span.begin; r < span.begin + span.count; ++r) {
                if (test.times()[static_cast<std::size_t>(r)] == e.time_index &&
                    test.observed()(r, test.outcome_col())) {
                    e.y_observed = test.cells()(r, test.outcome_col());
                    break;
                }
            }
        }
        out.push_back(std::move(fc));
    }
    return out;
}

}  // namespace longipred
