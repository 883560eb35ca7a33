#include "longipred/pipeline.hpp"

#include <algorithm>

namespace longipred {

std::vector<GeeFit> fit_imputations(const ImputedSet& imputed, const SelectionMask& mask,
                                    const FeatureScaler& scaler, const ModelSettings& settings,
                                    std::vector<std::string>* warnings) {
    std::vector<GeeFit> fits;
    fits.reserve(imputed.datasets.size());
    for (std::size_t m = 0; m < imputed.datasets.size(); ++m) {
        const LongitudinalDataset& complete = imputed.datasets[m];
        const LongitudinalDataset prepared =
            apply_mask(scaler.empty() ? complete : scaler.transform(complete), mask);
        GeeFit fit = fit_gee(prepared, settings.gee);
        if (warnings)
            for (const std::string& w : fit.warnings)
                warnings->push_back("imputation " + std::to_string(m + 1) + ": " + w);
        fits.push_back(std::move(fit));
    }
    return fits;
}

EnsembleModel assemble_model(std::vector<GeeFit> fits, const SelectionMask& mask,
                             const FeatureScaler& scaler,
                             const std::vector<std::string>& all_feature_names,
                             const ModelSettings& settings, std::vector<std::string>* warnings) {
    EnsembleModel model = pool_parameters(fits, mask, all_feature_names);
    model.scaler = scaler;
    if (fits.size() >= 2) {
        const int df = settings.ci_df.value_or(static_cast<int>(fits.size()) - 1);
        model.ci_table = pooled_ci(fits, settings.ci_level, df, settings.rubin_variant);
    } else if (warnings) {
        warnings->push_back("ensemble: confidence intervals undefined for M=1");
    }
    return model;
}

TrainedModel train_model(const LongitudinalDataset& train, const ModelSettings& settings,
                         Seed seed) {
    TrainedModel out;
    std::vector<Index> covariates(static_cast<std::size_t>(train.n_covariates()));
    std::iota(covariates.begin(), covariates.end(), Index{0});
    const SelectionMask mask = screen_features(train, settings.q, covariates, settings.screen_mode);

    FeatureScaler scaler;
    if (settings.standardize) scaler = FeatureScaler::fit(train);

    ImputationConfig imp = settings.imputation;
    imp.seed = derive_seed(seed, "imputation-stage");
    out.imputed = mice_pmm(train, imp);

    std::vector<GeeFit> fits = fit_imputations(out.imputed, mask, scaler, settings, &out.warnings);
    out.model = assemble_model(std::move(fits), mask, scaler, train.feature_names(), settings,
                               &out.warnings);
    return out;
}

std::vector<SubjectForecast> predict_dataset(const EnsembleModel& model,
                                             const LongitudinalDataset& test,
                                             const ModelSettings& settings) {
    return forecast_dataset(model, test, settings.fine_tune, settings.clamp);
}

std::vector<std::vector<std::pair<double, double>>> endpoint_pairs(
    const std::vector<SubjectForecast>& forecasts, MetricVariant variant) {
    std::vector<std::vector<std::pair<double, double>>> by_subject;
    for (const SubjectForecast& fc : forecasts) {
        const ForecastEntry* base = nullptr;
        const ForecastEntry* end = nullptr;
        for (const ForecastEntry& e : fc.entries) {
            if (e.skipped || !e.y_observed) continue;
            if (variant == MetricVariant::adjusted && !e.y_hat_adjusted) continue;
            if (!base) base = &e;
            end = &e;
        }
        if (!base || base == end) continue;
        auto value = [&](const ForecastEntry& e) {
            return variant == MetricVariant::adjusted ? *e.y_hat_adjusted : e.y_hat_raw;
        };
        by_subject.push_back({{*base->y_observed, value(*base)}, {*end->y_observed, value(*end)}});
    }
    return by_subject;
}

EvaluationReport evaluate_forecasts(const std::vector<SubjectForecast>& forecasts,
                                    const ModelSettings& settings, double tau) {
    EvaluationReport report;
    const bool exclude = settings.fine_tune && settings.exclude_tuning_day;

    const auto raw_pairs = forecast_pairs(forecasts, MetricVariant::raw, exclude);
    report.raw_longitudinal = metrics(raw_pairs, MetricVariant::raw, Aggregation::longitudinal);
    report.raw_subject_mean = per_subject_mean_metrics(forecasts, MetricVariant::raw, exclude);
    report.changes_raw = classify_changes(forecasts, tau, MetricVariant::raw);
    const auto rm_raw = endpoint_pairs(forecasts, MetricVariant::raw);
    if (!rm_raw.empty()) report.rmcorr_raw = rmcorr(rm_raw);

    if (settings.fine_tune) {
        const auto adj_pairs = forecast_pairs(forecasts, MetricVariant::adjusted, exclude);
        if (adj_pairs.size() >= 2) {
            report.adjusted_longitudinal =
                metrics(adj_pairs, MetricVariant::adjusted, Aggregation::longitudinal);
            report.adjusted_subject_mean =
                per_subject_mean_metrics(forecasts, MetricVariant::adjusted, exclude);
        } else {
            report.warnings.push_back("evaluate: too few adjusted pairs for metrics");
        }
        report.changes_adjusted = classify_changes(forecasts, tau, MetricVariant::adjusted);
        const auto rm_adj = endpoint_pairs(forecasts, MetricVariant::adjusted);
        if (!rm_adj.empty()) report.rmcorr_adjusted = rmcorr(rm_adj);
    }
    return report;
}

}  // namespace longipred
