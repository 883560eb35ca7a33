#pragma once

#include <functional>
#include <vector>

#include "longipred/dataset.hpp"

namespace longipred {

struct ImputationConfig {
    int m_imputations = 15;
    int n_cycles = 10;
    int n_donors = 5;
    Seed seed = 0;

    void validate() const {
        if (m_imputations < 1) throw ConfigError("imputation: m_imputations must be >= 1");
        if (n_cycles < 1) throw ConfigError("imputation: n_cycles must be >= 1");
        if (n_donors < 1) throw ConfigError("imputation: n_donors must be >= 1");
    }
};

struct ImputedCell {
    Index row = 0;
    Index col = 0;
};

/// M complete copies of one dataset. Originally observed cells are identical
/// across all copies and to the source; only masked cells differ.
struct ImputedSet {
    std::vector<LongitudinalDataset> datasets;
    std::vector<ImputedCell> imputed_cells;
    ImputationConfig config;
};

/// Chained-equations imputation with predictive mean matching.
///
/// Per imputation: missing cells start at their column means; then for each
/// of n_cycles sweeps, every column with missing entries (visited in ascending
/// missing-count order, ties by column index) is regressed by least squares on
/// all other columns over the rows where it is observed, predictions are made
/// for every row, and each missing cell receives the observed value of one of
/// the n_donors rows whose predictions sit closest, drawn uniformly.
///
/// The M imputations are independent given their per-imputation derived seeds
/// and may run on up to `workers` threads; the result is identical for any
/// worker count.
ImputedSet mice_pmm(const LongitudinalDataset& ds, const ImputationConfig& cfg, int workers = 1);

/// Relative efficiency of m imputations at missing fraction gamma: (1 + gamma/m)^-1.
double efficiency(double gamma, int m);

struct SweepRow {
    int m = 0;
    double accuracy = 0.0;
};

/// Runs the downstream fit/evaluate callback once per candidate M and
/// tabulates the resulting accuracy.
std::vector<SweepRow> imputation_sweep(const LongitudinalDataset& ds, const ImputationConfig& base,
                                       const std::vector<int>& m_values,
                                       const std::function<double(const ImputedSet&)>& fit_eval);

}  // namespace longipred
