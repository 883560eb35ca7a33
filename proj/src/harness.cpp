#include "longipred/harness.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "longipred/parallel.hpp"

namespace longipred {

namespace {

void add_confusion(std::array<std::array<int, 3>, 3>& into,
                   const std::array<std::array<int, 3>, 3>& from) {
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) into[i][j] += from[i][j];
}

ReplicateResult run_replicate(const LongitudinalDataset& ds, const ModelSettings& settings,
                              const HarnessConfig& harness, int index) {
    ReplicateResult rep;
    rep.index = index;
    const auto idx = static_cast<std::uint64_t>(index);

    const ReplicateSplit split =
        bootstrap_replicate_split(ds.n_subjects(), harness.train_fraction, harness.seed, idx);
    if (split.train_draws.empty() || split.test_draws.empty())
        throw SizeError("bootstrap: degenerate replicate split");
    const LongitudinalDataset train = ds.resample_subjects(split.train_draws);
    const LongitudinalDataset test = ds.resample_subjects(split.test_draws);

    const TrainedModel trained =
        train_model(train, settings, derive_seed(harness.seed, "bootstrap-model", idx));
    const auto forecasts = predict_dataset(trained.model, test, settings);
    const EvaluationReport ev = evaluate_forecasts(forecasts, settings, harness.tau);

    rep.raw_longitudinal = ev.raw_longitudinal;
    rep.adjusted_longitudinal = ev.adjusted_longitudinal;
    rep.raw_subject_mean = ev.raw_subject_mean;
    rep.adjusted_subject_mean = ev.adjusted_subject_mean;
    rep.rmcorr_raw = ev.rmcorr_raw;
    rep.rmcorr_adjusted = ev.rmcorr_adjusted;
    rep.confusion_raw = ev.changes_raw.confusion;
    if (ev.changes_adjusted) rep.confusion_adjusted = ev.changes_adjusted->confusion;
    for (const Index j : trained.model.mask.selected_features)
        rep.selected_features.push_back(ds.feature_names()[static_cast<std::size_t>(j)]);
    return rep;
}

}  // namespace

ReplicateSplit bootstrap_replicate_split(Index n_subjects, double train_fraction, Seed seed,
                                         std::uint64_t replicate_index) {
    if (n_subjects < 2) throw SizeError("bootstrap: need at least 2 subjects");
    auto draw_rng = make_rng(seed, "bootstrap-draw", replicate_index);
    std::vector<Index> draws(static_cast<std::size_t>(n_subjects));
    for (auto& d : draws)
        d = static_cast<Index>(bounded(draw_rng, static_cast<std::uint64_t>(n_subjects)));

    // Distinct original subjects in the sample; the 70/30 split happens over
    // these, and every draw follows its original to one side. Duplicated rows
    // can therefore never leak across the split.
    std::vector<Index> originals = draws;
    std::sort(originals.begin(), originals.end());
    originals.erase(std::unique(originals.begin(), originals.end()), originals.end());

    auto split_rng = make_rng(seed, "bootstrap-split", replicate_index);
    for (std::size_t i = originals.size() - 1; i > 0; --i) {
        const auto j = static_cast<std::size_t>(bounded(split_rng, i + 1));
        std::swap(originals[i], originals[j]);
    }
    const auto n_train = std::min(
        originals.size(),
        static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(originals.size()))));
    const std::set<Index> train_set(originals.begin(),
                                    originals.begin() + static_cast<std::ptrdiff_t>(n_train));

    ReplicateSplit split;
    for (const Index d : draws)
        (train_set.count(d) ? split.train_draws : split.test_draws).push_back(d);
    return split;
}

BootstrapReport bootstrap(const LongitudinalDataset& ds, const ModelSettings& settings,
                          const HarnessConfig& harness) {
    if (harness.n_boot < 1) throw ConfigError("bootstrap: n_boot must be >= 1");
    if (ds.n_subjects() < 2) throw SizeError("bootstrap: need at least 2 subjects");

    BootstrapReport report;
    report.n_boot = harness.n_boot;
    report.per_replicate.resize(static_cast<std::size_t>(harness.n_boot));

    parallel_for_indexed(static_cast<std::size_t>(harness.n_boot), harness.workers,
                         [&](std::size_t i) {
                             try {
                                 report.per_replicate[i] =
                                     run_replicate(ds, settings, harness, static_cast<int>(i));
                             } catch (const std::exception& e) {
                                 ReplicateResult failed;
                                 failed.index = static_cast<int>(i);
                                 failed.failed = true;
                                 failed.failure_reason = e.what();
                                 report.per_replicate[i] = std::move(failed);
                             }
                         });

    std::vector<double> raw_pearson;
    std::vector<double> raw_spearman;
    for (const ReplicateResult& rep : report.per_replicate) {
        if (rep.failed) {
            ++report.n_failed;
            continue;
        }
        for (const auto& name : rep.selected_features) ++report.feature_counts[name];
        add_confusion(report.confusion_raw, rep.confusion_raw);
        add_confusion(report.confusion_adjusted, rep.confusion_adjusted);
        if (rep.raw_longitudinal && rep.raw_longitudinal->correlation_defined) {
            raw_pearson.push_back(rep.raw_longitudinal->pearson_r);
            raw_spearman.push_back(rep.raw_longitudinal->spearman_r);
        }
    }
    if (static_cast<double>(report.n_failed) >
        harness.max_failure_fraction * static_cast<double>(harness.n_boot))
        throw HarnessError("bootstrap: " + std::to_string(report.n_failed) + " of " +
                           std::to_string(harness.n_boot) + " replicates failed");

    // Matched-spread null: zero-mean normal draws with the replicate
    // correlations' standard deviation, same count, seeded.
    auto make_null = [&](const std::vector<double>& values, const char* stream) {
        std::vector<double> null_sample;
        if (values.size() < 2) return null_sample;
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
        auto rng = make_rng(harness.seed, stream);
        std::normal_distribution<double> norm(0.0, sd);
        null_sample.reserve(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) null_sample.push_back(norm(rng));
        return null_sample;
    };
    report.null_pearson = make_null(raw_pearson, "null-pearson");
    report.null_spearman = make_null(raw_spearman, "null-spearman");
    return report;
}

LoocvReport loocv(const LongitudinalDataset& ds, const ModelSettings& settings, double tau,
                  Seed seed, int workers) {
    if (ds.n_subjects() < 3) throw SizeError("loocv: need at least 3 subjects");
    const auto n = static_cast<std::size_t>(ds.n_subjects());

    struct Fold {
        std::optional<SubjectForecast> forecast;
        std::string failure;
    };
    std::vector<Fold> folds(n);

    parallel_for_indexed(n, workers, [&](std::size_t i) {
        const std::string held_out = ds.subjects()[i].id;
        try {
            std::vector<std::string> train_ids;
            for (const SubjectSpan& s : ds.subjects())
                if (s.id != held_out) train_ids.push_back(s.id);
            const LongitudinalDataset train = ds.filter_subjects(train_ids);
            const LongitudinalDataset test = ds.filter_subjects({held_out});
            const TrainedModel trained =
                train_model(train, settings, derive_seed(seed, "loocv-fold", i));
            auto forecasts = predict_dataset(trained.model, test, settings);
            if (forecasts.size() != 1)
                throw IntegrityError("loocv: expected exactly one test subject");
            folds[i].forecast = std::move(forecasts.front());
        } catch (const std::exception& e) {
            folds[i].failure = e.what();
        }
    });

    LoocvReport report;
    for (std::size_t i = 0; i < n; ++i) {
        if (folds[i].forecast) {
            report.forecasts.push_back(std::move(*folds[i].forecast));
        } else {
            report.failed_folds.emplace_back(ds.subjects()[i].id, folds[i].failure);
        }
    }
    if (report.forecasts.empty()) throw HarnessError("loocv: every fold failed");

    report.changes_raw = classify_changes(report.forecasts, tau, MetricVariant::raw);
    if (settings.fine_tune)
        report.changes_adjusted = classify_changes(report.forecasts, tau, MetricVariant::adjusted);
    const bool exclude = settings.fine_tune && settings.exclude_tuning_day;
    const auto raw_pairs = forecast_pairs(report.forecasts, MetricVariant::raw, exclude);
    if (raw_pairs.size() >= 2)
        report.raw_longitudinal = metrics(raw_pairs, MetricVariant::raw, Aggregation::longitudinal);
    if (settings.fine_tune) {
        const auto adj_pairs = forecast_pairs(report.forecasts, MetricVariant::adjusted, exclude);
        if (adj_pairs.size() >= 2)
            report.adjusted_longitudinal =
                metrics(adj_pairs, MetricVariant::adjusted, Aggregation::longitudinal);
    }
    return report;
}

double split_accuracy(const LongitudinalDataset& ds, const ModelSettings& settings,
                      double train_fraction, Seed seed, MetricVariant variant) {
    const SplitSpec split = split_by_subject(ds, train_fraction, derive_seed(seed, "sweep-split"));
    const LongitudinalDataset train = ds.filter_subjects(split.train_subjects);
    const LongitudinalDataset test = ds.filter_subjects(split.test_subjects);
    const TrainedModel trained = train_model(train, settings, derive_seed(seed, "sweep-model"));
    const auto forecasts = predict_dataset(trained.model, test, settings);
    const bool exclude = settings.fine_tune && settings.exclude_tuning_day;
    const auto pairs = forecast_pairs(forecasts, variant, exclude);
    const MetricSet ms = metrics(pairs, variant, Aggregation::longitudinal);
    return ms.pearson_r;
}

}  // namespace longipred
