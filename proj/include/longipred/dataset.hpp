#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "longipred/errors.hpp"
#include "longipred/rng.hpp"
#include "longipred/stats.hpp"

namespace longipred {

using BoolArray = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// One subject's contiguous row range inside a LongitudinalDataset.
struct SubjectSpan {
    std::string id;
    Index begin = 0;
    Index count = 0;
};

/// A single subject-time row, used for building datasets.
struct Observation {
    std::string subject_id;
    int time_index = 1;  // ordinal, >= 1
    std::vector<std::optional<double>> features;
    std::vector<std::optional<double>> covariates;
    std::optional<double> outcome;
};

/// Immutable longitudinal table: one row per subject-time, columns laid out as
/// [features | covariates | outcome]. The observed mask is authoritative;
/// cells it marks absent hold NaN. Rows are sorted (subject id, time) and
/// covariates must be constant within subject wherever observed.
class LongitudinalDataset {
public:
    LongitudinalDataset() = default;

    LongitudinalDataset(std::vector<std::string> subject_per_row, std::vector<int> time_per_row,
                        Matrix cells, BoolArray observed, std::vector<std::string> feature_names,
                        std::vector<std::string> covariate_names, std::string outcome_name);

    static LongitudinalDataset from_observations(const std::vector<Observation>& rows,
                                                 std::vector<std::string> feature_names,
                                                 std::vector<std::string> covariate_names,
                                                 std::string outcome_name);

    Index rows() const { return cells_.rows(); }
    Index n_features() const { return static_cast<Index>(feature_names_.size()); }
    Index n_covariates() const { return static_cast<Index>(covariate_names_.size()); }
    Index n_columns() const { return cells_.cols(); }  // p + c + 1
    Index outcome_col() const { return n_features() + n_covariates(); }
    Index n_subjects() const { return static_cast<Index>(subjects_.size()); }

    const Matrix& cells() const { return cells_; }
    const BoolArray& observed() const { return observed_; }
    const std::vector<SubjectSpan>& subjects() const { return subjects_; }
    const std::vector<int>& times() const { return times_; }
    const std::string& subject_of_row(Index r) const;

    const std::vector<std::string>& feature_names() const { return feature_names_; }
    const std::vector<std::string>& covariate_names() const { return covariate_names_; }
    const std::string& outcome_name() const { return outcome_name_; }

    auto features() const { return cells_.leftCols(n_features()); }
    auto covariates() const { return cells_.middleCols(n_features(), n_covariates()); }
    auto outcome() const { return cells_.col(outcome_col()); }

    bool complete() const { return observed_.all(); }

    /// Returns a dataset containing only the named subjects (ids not present are ignored).
    LongitudinalDataset filter_subjects(const std::vector<std::string>& ids) const;

    /// Returns a dataset built from the given subject draws (duplicates allowed).
    /// Each draw gets a distinct replicate identity so subject-level invariants hold.
    LongitudinalDataset resample_subjects(const std::vector<Index>& subject_indices) const;

    /// Returns a copy with the given replacement cell matrix (same shape), fully observed.
    LongitudinalDataset with_complete_cells(Matrix cells) const;

    /// Cell-for-cell equality, including the missing markers.
    bool equals(const LongitudinalDataset& other) const;

private:
    void validate_and_sort(std::vector<std::string> subject_per_row);
    void index_subjects(const std::vector<std::string>& subject_per_row);

    Matrix cells_;
    BoolArray observed_;
    std::vector<SubjectSpan> subjects_;
    std::vector<int> times_;
    std::vector<std::string> feature_names_;
    std::vector<std::string> covariate_names_;
    std::string outcome_name_;
};

/// Disjoint subject-level train/test split.
struct SplitSpec {
    std::vector<std::string> train_subjects;
    std::vector<std::string> test_subjects;
    Seed seed = 0;
};

/// Splits subjects into train/test with |train| = round(train_fraction * N).
/// Deterministic for a fixed seed; every subject lands on exactly one side.
SplitSpec split_by_subject(const LongitudinalDataset& ds, double train_fraction, Seed seed);

/// Fraction of absent cells over all feature, covariate and outcome cells.
double missing_fraction(const LongitudinalDataset& ds);

}  // namespace longipred
