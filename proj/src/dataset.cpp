#include "longipred/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <unordered_set>

namespace longipred {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

LongitudinalDataset::LongitudinalDataset(std::vector<std::string> subject_per_row,
                                         std::vector<int> time_per_row, Matrix cells,
                                         BoolArray observed,
                                         std::vector<std::string> feature_names,
                                         std::vector<std::string> covariate_names,
                                         std::string outcome_name)
    : cells_(std::move(cells)),
      observed_(std::move(observed)),
      times_(std::move(time_per_row)),
      feature_names_(std::move(feature_names)),
      covariate_names_(std::move(covariate_names)),
      outcome_name_(std::move(outcome_name)) {
    const Index n = cells_.rows();
    if (static_cast<Index>(subject_per_row.size()) != n ||
        static_cast<Index>(times_.size()) != n || observed_.rows() != n) {
        throw IntegrityError("dataset: row bookkeeping sizes disagree");
    }
    if (cells_.cols() != n_features() + n_covariates() + 1 || observed_.cols() != cells_.cols()) {
        throw IntegrityError("dataset: column count does not match the declared names");
    }
    validate_and_sort(std::move(subject_per_row));
}

LongitudinalDataset LongitudinalDataset::from_observations(
    const std::vector<Observation>& rows, std::vector<std::string> feature_names,
    std::vector<std::string> covariate_names, std::string outcome_name) {
    const Index p = static_cast<Index>(feature_names.size());
    const Index c = static_cast<Index>(covariate_names.size());
    const Index n = static_cast<Index>(rows.size());
    Matrix cells(n, p + c + 1);
    BoolArray observed(n, p + c + 1);
    std::vector<std::string> subj(n);
    std::vector<int> times(n);
    for (Index r = 0; r < n; ++r) {
        const Observation& o = rows[static_cast<std::size_t>(r)];
        if (static_cast<Index>(o.features.size()) != p)
            throw IntegrityError("observation: feature vector length mismatch for subject " + o.subject_id);
        if (static_cast<Index>(o.covariates.size()) != c)
            throw IntegrityError("observation: covariate vector length mismatch for subject " + o.subject_id);
        subj[static_cast<std::size_t>(r)] = o.subject_id;
        times[static_cast<std::size_t>(r)] = o.time_index;
        auto checked = [&](const std::optional<double>& v) {
            if (v && !std::isfinite(*v))
                throw IntegrityError("observation: non-finite value for subject " + o.subject_id);
            return v.value_or(kNaN);
        };
        for (Index j = 0; j < p; ++j) {
            const auto& v = o.features[static_cast<std::size_t>(j)];
            observed(r, j) = v.has_value();
            cells(r, j) = checked(v);
        }
        for (Index j = 0; j < c; ++j) {
            const auto& v = o.covariates[static_cast<std::size_t>(j)];
            observed(r, p + j) = v.has_value();
            cells(r, p + j) = checked(v);
        }
        observed(r, p + c) = o.outcome.has_value();
        cells(r, p + c) = checked(o.outcome);
    }
    return LongitudinalDataset(std::move(subj), std::move(times), std::move(cells),
                               std::move(observed), std::move(feature_names),
                               std::move(covariate_names), std::move(outcome_name));
}

void LongitudinalDataset::validate_and_sort(std::vector<std::string> subject_per_row) {
    const Index n = rows();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
        const auto& sa = subject_per_row[static_cast<std::size_t>(a)];
        const auto& sb = subject_per_row[static_cast<std::size_t>(b)];
        if (sa != sb) return sa < sb;
        return times_[static_cast<std::size_t>(a)] < times_[static_cast<std::size_t>(b)];
    });

    Matrix cells(n, cells_.cols());
    BoolArray obs(n, cells_.cols());
    std::vector<int> times(static_cast<std::size_t>(n));
    std::vector<std::string> subj(static_cast<std::size_t>(n));
    for (Index r = 0; r < n; ++r) {
        const Index s = order[static_cast<std::size_t>(r)];
        cells.row(r) = cells_.row(s);
        obs.row(r) = observed_.row(s);
        times[static_cast<std::size_t>(r)] = times_[static_cast<std::size_t>(s)];
        subj[static_cast<std::size_t>(r)] = subject_per_row[static_cast<std::size_t>(s)];
    }
    cells_ = std::move(cells);
    observed_ = std::move(obs);
    times_ = std::move(times);
    index_subjects(subj);

    // Masked cells hold NaN regardless of what the caller passed in.
    for (Index r = 0; r < n; ++r)
        for (Index j = 0; j < cells_.cols(); ++j)
            if (!observed_(r, j)) cells_(r, j) = kNaN;

    for (const SubjectSpan& span : subjects_) {
        int prev = 0;
        for (Index r = span.begin; r < span.begin + span.count; ++r) {
            const int t = times_[static_cast<std::size_t>(r)];
            if (t < 1) throw IntegrityError("dataset: time index below 1 for subject " + span.id);
            if (t == prev)
                throw IntegrityError("dataset: duplicate (subject, time) pair: (" + span.id +
                                     ", " + std::to_string(t) + ")");
            prev = t;
        }
        // Covariates are subject-level; observed values must agree across rows.
        for (Index j = n_features(); j < outcome_col(); ++j) {
            bool seen = false;
            double value = 0.0;
            for (Index r = span.begin; r < span.begin + span.count; ++r) {
                if (!observed_(r, j)) continue;
                if (seen && cells_(r, j) != value)
                    throw IntegrityError("dataset: covariate '" +
                                         covariate_names_[static_cast<std::size_t>(j - n_features())] +
                                         "' varies within subject " + span.id);
                seen = true;
                value = cells_(r, j);
            }
        }
    }
}

void LongitudinalDataset::index_subjects(const std::vector<std::string>& subject_per_row) {
    subjects_.clear();
    const Index n = rows();
    Index r = 0;
    while (r < n) {
        Index e = r;
        while (e + 1 < n && subject_per_row[static_cast<std::size_t>(e + 1)] ==
                                subject_per_row[static_cast<std::size_t>(r)])
            ++e;
        subjects_.push_back({subject_per_row[static_cast<std::size_t>(r)], r, e - r + 1});
        r = e + 1;
    }
}

const std::string& LongitudinalDataset::subject_of_row(Index r) const {
    for (const SubjectSpan& s : subjects_) {
        if (r >= s.begin && r < s.begin + s.count) return s.id;
    }
    throw IntegrityError("dataset: row index out of range");
}

LongitudinalDataset LongitudinalDataset::filter_subjects(const std::vector<std::string>& ids) const {
    const std::unordered_set<std::string> keep(ids.begin(), ids.end());
    std::vector<std::string> subj;
    std::vector<int> times;
    std::vector<Index> rows_kept;
    for (const SubjectSpan& s : subjects_) {
        if (!keep.count(s.id)) continue;
        for (Index r = s.begin; r < s.begin + s.count; ++r) {
            rows_kept.push_back(r);
            subj.push_back(s.id);
            times.push_back(times_[static_cast<std::size_t>(r)]);
        }
    }
    Matrix cells(static_cast<Index>(rows_kept.size()), cells_.cols());
    BoolArray obs(static_cast<Index>(rows_kept.size()), cells_.cols());
    for (Index r = 0; r < cells.rows(); ++r) {
        cells.row(r) = cells_.row(rows_kept[static_cast<std::size_t>(r)]);
        obs.row(r) = observed_.row(rows_kept[static_cast<std::size_t>(r)]);
    }
    return LongitudinalDataset(std::move(subj), std::move(times), std::move(cells), std::move(obs),
                               feature_names_, covariate_names_, outcome_name_);
}

LongitudinalDataset LongitudinalDataset::resample_subjects(const std::vector<Index>& subject_indices) const {
    std::vector<std::string> subj;
    std::vector<int> times;
    std::vector<Index> src_rows;
    for (std::size_t k = 0; k < subject_indices.size(); ++k) {
        const Index si = subject_indices[k];
        if (si < 0 || si >= n_subjects()) throw IntegrityError("resample: subject index out of range");
        const SubjectSpan& s = subjects_[static_cast<std::size_t>(si)];
        // Zero-padded draw ordinal keeps replicate identities distinct and ordering stable.
        char tag[16];
        std::snprintf(tag, sizeof(tag), "%04zu#", k);
        const std::string id = std::string(tag) + s.id;
        for (Index r = s.begin; r < s.begin + s.count; ++r) {
            subj.push_back(id);
            times.push_back(times_[static_cast<std::size_t>(r)]);
            src_rows.push_back(r);
        }
    }
    Matrix cells(static_cast<Index>(src_rows.size()), cells_.cols());
    BoolArray obs(static_cast<Index>(src_rows.size()), cells_.cols());
    for (Index r = 0; r < cells.rows(); ++r) {
        cells.row(r) = cells_.row(src_rows[static_cast<std::size_t>(r)]);
        obs.row(r) = observed_.row(src_rows[static_cast<std::size_t>(r)]);
    }
    return LongitudinalDataset(std::move(subj), std::move(times), std::move(cells), std::move(obs),
                               feature_names_, covariate_names_, outcome_name_);
}

LongitudinalDataset LongitudinalDataset::with_complete_cells(Matrix cells) const {
    if (cells.rows() != rows() || cells.cols() != n_columns())
        throw IntegrityError("with_complete_cells: shape mismatch");
    std::vector<std::string> subj(static_cast<std::size_t>(rows()));
    for (const SubjectSpan& s : subjects_)
        for (Index r = s.begin; r < s.begin + s.count; ++r)
            subj[static_cast<std::size_t>(r)] = s.id;
    BoolArray obs = BoolArray::Constant(rows(), n_columns(), true);
    return LongitudinalDataset(std::move(subj), times_, std::move(cells), std::move(obs),
                               feature_names_, covariate_names_, outcome_name_);
}

bool LongitudinalDataset::equals(const LongitudinalDataset& other) const {
    if (rows() != other.rows() || n_columns() != other.n_columns()) return false;
    if (feature_names_ != other.feature_names_ || covariate_names_ != other.covariate_names_ ||
        outcome_name_ != other.outcome_name_ || times_ != other.times_)
        return false;
    if (subjects_.size() != other.subjects_.size()) return false;
    for (std::size_t i = 0; i < subjects_.size(); ++i) {
        if (subjects_[i].id != other.subjects_[i].id || subjects_[i].begin != other.subjects_[i].begin ||
            subjects_[i].count != other.subjects_[i].count)
            return false;
    }
    for (Index r = 0; r < rows(); ++r) {
        for (Index j = 0; j < n_columns(); ++j) {
            if (observed_(r, j) != other.observed_(r, j)) return false;
            if (observed_(r, j) && cells_(r, j) != other.cells_(r, j)) return false;
        }
    }
    return true;
}

SplitSpec split_by_subject(const LongitudinalDataset& ds, double train_fraction, Seed seed) {
    if (ds.n_subjects() < 2) throw SizeError("split_by_subject: need at least 2 subjects");
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
        throw ConfigError("split_by_subject: train_fraction must lie in (0, 1)");
    const Index n = ds.n_subjects();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    auto rng = make_rng(seed, "split");
    // Fisher-Yates with the library's own bounded draw, for reproducibility.
    for (Index i = n - 1; i > 0; --i) {
        const auto j = static_cast<Index>(bounded(rng, static_cast<std::uint64_t>(i) + 1));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }
    const auto n_train = static_cast<Index>(std::lround(train_fraction * static_cast<double>(n)));
    SplitSpec spec;
    spec.seed = seed;
    for (Index i = 0; i < n; ++i) {
        const std::string& id = ds.subjects()[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])].id;
        (i < n_train ? spec.train_subjects : spec.test_subjects).push_back(id);
    }
    std::sort(spec.train_subjects.begin(), spec.train_subjects.end());
    std::sort(spec.test_subjects.begin(), spec.test_subjects.end());
    return spec;
}

double missing_fraction(const LongitudinalDataset& ds) {
    if (ds.rows() == 0) throw SizeError("missing_fraction: dataset is empty");
    const auto total = static_cast<double>(ds.rows() * ds.n_columns());
    const auto present = static_cast<double>(ds.observed().count());
    return (total - present) / total;
}

}  // namespace longipred
