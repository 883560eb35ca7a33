#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "longipred/pipeline.hpp"

namespace longipred {

struct HarnessConfig {
    int n_boot = 1000;
    double train_fraction = 0.7;
    double tau = 0.5;
    Seed seed = 0;
    int workers = 1;
    double max_failure_fraction = 0.2;
};

/// Outcome of one bootstrap replicate: every number the report aggregates.
struct ReplicateResult {
    int index = 0;
    bool failed = false;
    std::string failure_reason;
    std::optional<MetricSet> raw_longitudinal;
    std::optional<MetricSet> adjusted_longitudinal;
    std::optional<MetricSet> raw_subject_mean;
    std::optional<MetricSet> adjusted_subject_mean;
    std::optional<double> rmcorr_raw;
    std::optional<double> rmcorr_adjusted;
    std::vector<std::string> selected_features;
    std::array<std::array<int, 3>, 3> confusion_raw{};
    std::array<std::array<int, 3>, 3> confusion_adjusted{};
};

struct BootstrapReport {
    int n_boot = 0;
    int n_failed = 0;
    std::vector<ReplicateResult> per_replicate;
    std::vector<double> null_pearson;   // zero-mean normal, spread matched to the raw Pearson r's
    std::vector<double> null_spearman;  // likewise for Spearman
    std::map<std::string, int> feature_counts;
    std::array<std::array<int, 3>, 3> confusion_raw{};
    std::array<std::array<int, 3>, 3> confusion_adjusted{};
};

/// Subject draws of one bootstrap replicate, partitioned for the split.
/// Draws of the same original subject always land on the same side, so no
/// subject's rows can appear in both train and test.
struct ReplicateSplit {
    std::vector<Index> train_draws;
    std::vector<Index> test_draws;
};

ReplicateSplit bootstrap_replicate_split(Index n_subjects, double train_fraction, Seed seed,
                                         std::uint64_t replicate_index);

/// Bootstrap evaluation: per replicate, subjects are resampled with
/// replacement (duplicates keep distinct replicate identities), split 70/30
/// at the original-subject level, the full train pipeline runs on the
/// training side only, and the held-out side is scored raw and fine-tuned.
BootstrapReport bootstrap(const LongitudinalDataset& ds, const ModelSettings& settings,
                          const HarnessConfig& harness);

struct LoocvReport {
    std::vector<SubjectForecast> forecasts;  // one entry per completed fold
    std::vector<std::pair<std::string, std::string>> failed_folds;  // (subject, reason)
    ChangeGroups changes_raw;
    std::optional<ChangeGroups> changes_adjusted;
    std::optional<MetricSet> raw_longitudinal;
    std::optional<MetricSet> adjusted_longitudinal;
};

/// Leave-one-subject-out cross-validation with the same per-fold pipeline.
LoocvReport loocv(const LongitudinalDataset& ds, const ModelSettings& settings, double tau,
                  Seed seed, int workers = 1);

/// Accuracy (test Pearson r) of the full pipeline on a fixed split, used by
/// the M and q sweeps.
double split_accuracy(const LongitudinalDataset& ds, const ModelSettings& settings,
                      double train_fraction, Seed seed, MetricVariant variant);

}  // namespace longipred
