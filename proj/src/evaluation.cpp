#include "longipred/evaluation.hpp"

#include <algorithm>
#include <cmath>

namespace longipred {

MetricSet metrics(const std::vector<std::pair<double, double>>& pairs, MetricVariant variant,
                  Aggregation aggregation) {
    if (pairs.size() < 2) throw SizeError("metrics: need at least 2 pairs");
    MetricSet ms;
    ms.variant = variant;
    ms.aggregation = aggregation;
    ms.n_pairs = static_cast<Index>(pairs.size());

    std::vector<double> obs(pairs.size());
    std::vector<double> pred(pairs.size());
    double sq = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        obs[i] = pairs[i].first;
        pred[i] = pairs[i].second;
        const double d = pairs[i].second - pairs[i].first;
        sq += d * d;
    }
    ms.mse = sq / static_cast<double>(pairs.size());

    Eigen::Map<const Vector> vo(obs.data(), ms.n_pairs);
    Eigen::Map<const Vector> vp(pred.data(), ms.n_pairs);
    const double r = pearson(vo, vp);
    if (!std::isnan(r)) {
        ms.pearson_r = r;
        ms.spearman_r = spearman(obs, pred);
        ms.correlation_defined = !std::isnan(ms.spearman_r);
    }
    return ms;
}

namespace {

std::optional<double> entry_value(const ForecastEntry& e, MetricVariant variant) {
    if (e.skipped) return std::nullopt;
    if (variant == MetricVariant::adjusted) return e.y_hat_adjusted;
    return e.y_hat_raw;
}

bool drop_for_tuning(const SubjectForecast& fc, const ForecastEntry& e, bool exclude_tuning_day) {
    return exclude_tuning_day && fc.tuned && fc.tuning_time && e.time_index == *fc.tuning_time;
}

}  // namespace

std::vector<std::pair<double, double>> forecast_pairs(const std::vector<SubjectForecast>& forecasts,
                                                      MetricVariant variant,
                                                      bool exclude_tuning_day) {
    std::vector<std::pair<double, double>> pairs;
    for (const SubjectForecast& fc : forecasts) {
        for (const ForecastEntry& e : fc.entries) {
            if (!e.y_observed) continue;
            const auto v = entry_value(e, variant);
            if (!v) continue;
            if (drop_for_tuning(fc, e, exclude_tuning_day)) continue;
            pairs.emplace_back(*e.y_observed, *v);
        }
    }
    return pairs;
}

MetricSet per_subject_mean_metrics(const std::vector<SubjectForecast>& forecasts,
                                   MetricVariant variant, bool exclude_tuning_day) {
    std::vector<std::pair<double, double>> means;
    for (const SubjectForecast& fc : forecasts) {
        double so = 0.0, sp = 0.0;
        int n = 0;
        for (const ForecastEntry& e : fc.entries) {
            if (!e.y_observed) continue;
            const auto v = entry_value(e, variant);
            if (!v) continue;
            if (drop_for_tuning(fc, e, exclude_tuning_day)) continue;
            so += *e.y_observed;
            sp += *v;
            ++n;
        }
        if (n > 0) means.emplace_back(so / n, sp / n);
    }
    if (means.size() < 2)
        throw SizeError("per_subject_mean_metrics: need at least 2 subjects with scored predictions");
    return metrics(means, variant, Aggregation::per_subject_mean);
}

std::optional<double> rmcorr(
    const std::vector<std::vector<std::pair<double, double>>>& pairs_by_subject) {
    // Common-slope ANCOVA via within-subject centering: centering the response
    // and covariate per subject reduces the subject-intercept model to a
    // single regression through the origin, and
    // sign(slope) * sqrt(SS_cov / (SS_cov + SS_err)) equals the Pearson
    // correlation of the centered pairs.
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    int usable = 0;
    for (const auto& subject : pairs_by_subject) {
        if (subject.size() < 2) continue;  // singletons carry no within-subject information
        ++usable;
        double mo = 0.0, mp = 0.0;
        for (const auto& [o, p] : subject) {
            mo += o;
            mp += p;
        }
        mo /= static_cast<double>(subject.size());
        mp /= static_cast<double>(subject.size());
        for (const auto& [o, p] : subject) {
            const double co = o - mo;
            const double cp = p - mp;
            syy += co * co;
            sxx += cp * cp;
            sxy += cp * co;
        }
    }
    if (usable == 0) throw UndefinedError("rmcorr: no subject has 2 or more pairs");
    if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
    return sxy / std::sqrt(sxx * syy);
}

ChangeLabel change_label(double delta, double tau) {
    if (delta < -tau) return ChangeLabel::improved;
    if (delta > tau) return ChangeLabel::worsened;
    return ChangeLabel::stable;
}

std::string to_string(ChangeLabel label) {
    switch (label) {
        case ChangeLabel::improved: return "Improved";
        case ChangeLabel::stable: return "Stable";
        case ChangeLabel::worsened: return "Worsened";
    }
    return "Stable";
}

ChangeGroups classify_changes(const std::vector<SubjectForecast>& forecasts, double tau,
                              MetricVariant variant) {
    if (!(tau > 0.0)) throw ConfigError("classify_changes: tau must be positive");
    ChangeGroups groups;
    groups.tau = tau;
    for (const SubjectForecast& fc : forecasts) {
        // Baseline and end of study: earliest and latest times with both an
        // observed outcome and a scored prediction.
        const ForecastEntry* base = nullptr;
        const ForecastEntry* end = nullptr;
        for (const ForecastEntry& e : fc.entries) {
            if (!e.y_observed || !entry_value(e, variant)) continue;
            if (!base) base = &e;
            end = &e;
        }
        if (!base || base == end) {
            ++groups.excluded;
            continue;
        }
        ChangeAssignment a;
        a.subject_id = fc.subject_id;
        a.delta_observed = *end->y_observed - *base->y_observed;
        a.delta_predicted = *entry_value(*end, variant) - *entry_value(*base, variant);
        a.observed = change_label(a.delta_observed, tau);
        a.predicted = change_label(a.delta_predicted, tau);
        ++groups.confusion[static_cast<std::size_t>(a.observed)][static_cast<std::size_t>(a.predicted)];
        groups.assignments.push_back(std::move(a));
    }
    return groups;
}

}  // namespace longipred
