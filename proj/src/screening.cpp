#include "longipred/screening.hpp"

#include <algorithm>
#include <cmath>

namespace longipred {

SelectionMask screen_features(const LongitudinalDataset& train, int q,
                              std::vector<Index> always_include_covariates, ScreenMode mode) {
    if (q < 1) throw ConfigError("screen_features: q must be >= 1");
    const Index p = train.n_features();
    if (static_cast<Index>(q) > p)
        throw SelectionError("screen_features: q=" + std::to_string(q) + " exceeds feature count " +
                             std::to_string(p));
    for (Index c : always_include_covariates)
        if (c < 0 || c >= train.n_covariates())
            throw IntegrityError("screen_features: covariate index out of range");

    SelectionMask mask;
    mask.q = q;
    mask.mode = mode;
    mask.selected_covariates = std::move(always_include_covariates);
    mask.scores.resize(static_cast<std::size_t>(p));

    const Index yc = train.outcome_col();
    for (Index j = 0; j < p; ++j) {
        std::vector<double> xs;
        std::vector<double> ys;
        for (Index r = 0; r < train.rows(); ++r) {
            if (train.observed()(r, j) && train.observed()(r, yc)) {
                xs.push_back(train.cells()(r, j));
                ys.push_back(train.cells()(r, yc));
            }
        }
        FeatureScore& sc = mask.scores[static_cast<std::size_t>(j)];
        sc.n_pairs = static_cast<Index>(xs.size());
        if (sc.n_pairs < 3) {
            sc.note = "fewer than 3 complete pairs";
            continue;
        }
        Eigen::Map<const Vector> vx(xs.data(), sc.n_pairs);
        Eigen::Map<const Vector> vy(ys.data(), sc.n_pairs);
        const double rho = pearson(vx, vy);
        if (std::isnan(rho)) {
            sc.note = "zero variance";
            continue;
        }
        sc.rho = rho;
        sc.p_value = correlation_p_value(rho, sc.n_pairs);
        sc.rankable = true;
    }

    std::vector<Index> rankable;
    for (Index j = 0; j < p; ++j)
        if (mask.scores[static_cast<std::size_t>(j)].rankable) rankable.push_back(j);
    if (static_cast<int>(rankable.size()) < q)
        throw SelectionError("screen_features: only " + std::to_string(rankable.size()) +
                             " rankable features, q=" + std::to_string(q));

    // Ties break toward the smaller column index (stable sort over ascending index).
    std::stable_sort(rankable.begin(), rankable.end(), [&](Index a, Index b) {
        const FeatureScore& sa = mask.scores[static_cast<std::size_t>(a)];
        const FeatureScore& sb = mask.scores[static_cast<std::size_t>(b)];
        if (mode == ScreenMode::p_value) return sa.p_value < sb.p_value;
        return std::abs(sa.rho) > std::abs(sb.rho);
    });
    mask.selected_features.assign(rankable.begin(), rankable.begin() + q);
    const FeatureScore& last = mask.scores[static_cast<std::size_t>(mask.selected_features.back())];
    mask.threshold_used = mode == ScreenMode::p_value ? last.p_value : std::abs(last.rho);
    return mask;
}

LongitudinalDataset apply_mask(const LongitudinalDataset& ds, const SelectionMask& mask) {
    for (Index j : mask.selected_features)
        if (j < 0 || j >= ds.n_features())
            throw IntegrityError("apply_mask: feature index out of range");
    for (Index j : mask.selected_covariates)
        if (j < 0 || j >= ds.n_covariates())
            throw IntegrityError("apply_mask: covariate index out of range");

    const Index q = static_cast<Index>(mask.selected_features.size());
    const Index c = static_cast<Index>(mask.selected_covariates.size());
    const Index n = ds.rows();
    Matrix cells(n, q + c + 1);
    BoolArray obs(n, q + c + 1);
    std::vector<std::string> fnames;
    std::vector<std::string> cnames;
    for (Index k = 0; k < q; ++k) {
        const Index src = mask.selected_features[static_cast<std::size_t>(k)];
        cells.col(k) = ds.cells().col(src);
        obs.col(k) = ds.observed().col(src);
        fnames.push_back(ds.feature_names()[static_cast<std::size_t>(src)]);
    }
    for (Index k = 0; k < c; ++k) {
        const Index src = ds.n_features() + mask.selected_covariates[static_cast<std::size_t>(k)];
        cells.col(q + k) = ds.cells().col(src);
        obs.col(q + k) = ds.observed().col(src);
        cnames.push_back(ds.covariate_names()[static_cast<std::size_t>(
            mask.selected_covariates[static_cast<std::size_t>(k)])]);
    }
    cells.col(q + c) = ds.cells().col(ds.outcome_col());
    obs.col(q + c) = ds.observed().col(ds.outcome_col());

    std::vector<std::string> subj(static_cast<std::size_t>(n));
    for (const SubjectSpan& s : ds.subjects())
        for (Index r = s.begin; r < s.begin + s.count; ++r)
            subj[static_cast<std::size_t>(r)] = s.id;
    return LongitudinalDataset(std::move(subj), ds.times(), std::move(cells), std::move(obs),
                               std::move(fnames), std::move(cnames), ds.outcome_name());
}

FeatureScaler FeatureScaler::fit(const LongitudinalDataset& train) {
    const Index p = train.n_features();
    FeatureScaler s;
    s.mean = Vector::Zero(p);
    s.sd = Vector::Ones(p);
    for (Index j = 0; j < p; ++j) {
        double sum = 0.0;
        Index cnt = 0;
        for (Index r = 0; r < train.rows(); ++r) {
            if (train.observed()(r, j)) {
                sum += train.cells()(r, j);
                ++cnt;
            }
        }
        if (cnt == 0) continue;
        const double mean = sum / static_cast<double>(cnt);
        double ss = 0.0;
        for (Index r = 0; r < train.rows(); ++r)
            if (train.observed()(r, j)) ss += (train.cells()(r, j) - mean) * (train.cells()(r, j) - mean);
        const double sd = cnt > 1 ? std::sqrt(ss / static_cast<double>(cnt - 1)) : 0.0;
        s.mean(j) = mean;
        s.sd(j) = sd > 0.0 ? sd : 1.0;
    }
    return s;
}

LongitudinalDataset FeatureScaler::transform(const LongitudinalDataset& ds) const {
    if (mean.size() != ds.n_features())
        throw IntegrityError("scaler: fitted on a different feature count");
    Matrix cells = ds.cells();
    for (Index j = 0; j < ds.n_features(); ++j)
        for (Index r = 0; r < ds.rows(); ++r)
            if (ds.observed()(r, j)) cells(r, j) = (cells(r, j) - mean(j)) / sd(j);
    std::vector<std::string> subj(static_cast<std::size_t>(ds.rows()));
    for (const SubjectSpan& s : ds.subjects())
        for (Index r = s.begin; r < s.begin + s.count; ++r)
            subj[static_cast<std::size_t>(r)] = s.id;
    return LongitudinalDataset(std::move(subj), ds.times(), std::move(cells),
                               ds.observed(), ds.feature_names(), ds.covariate_names(),
                               ds.outcome_name());
}

}  // namespace longipred
