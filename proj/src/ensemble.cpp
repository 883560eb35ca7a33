#include "longipred/ensemble.hpp"

#include <cmath>

namespace longipred {

namespace {

void check_layouts(const std::vector<GeeFit>& fits) {
    if (fits.empty()) throw SizeError("ensemble: no fits supplied");
    for (const GeeFit& f : fits) {
        if (f.feature_coefs.size() != fits.front().feature_coefs.size() ||
            f.covariate_coefs.size() != fits.front().covariate_coefs.size() ||
            f.link != fits.front().link)
            throw IntegrityError("ensemble: fits have mismatched coefficient layouts");
    }
}

}  // namespace

EnsembleModel pool_parameters(const std::vector<GeeFit>& fits, const SelectionMask& mask,
                              const std::vector<std::string>& all_feature_names) {
    check_layouts(fits);
    const Index q = fits.front().feature_coefs.size();
    const Index c = fits.front().covariate_coefs.size();
    if (static_cast<Index>(mask.selected_features.size()) != q ||
        static_cast<Index>(mask.selected_covariates.size()) != c)
        throw IntegrityError("ensemble: mask does not match the fits' coefficient layout");
    const auto p = static_cast<Index>(all_feature_names.size());

    const auto m = static_cast<double>(fits.size());
    EnsembleModel model;
    model.mask = mask;
    model.link = fits.front().link;
    model.feature_names = all_feature_names;
    model.covariate_names = fits.front().covariate_names;
    model.per_imputation_fits = fits;
    model.pooled_feature_coefs = Vector::Zero(p);
    model.pooled_covariate_coefs = Vector::Zero(c);
    Vector feat = Vector::Zero(q);
    for (const GeeFit& f : fits) {
        model.pooled_intercept += f.intercept / m;
        feat += f.feature_coefs / m;
        model.pooled_covariate_coefs += f.covariate_coefs / m;
    }
    for (Index k = 0; k < q; ++k) {
        const Index col = mask.selected_features[static_cast<std::size_t>(k)];
        if (col < 0 || col >= p) throw IntegrityError("ensemble: mask feature index out of range");
        model.pooled_feature_coefs(col) = feat(k);
    }
    return model;
}

std::vector<CiEntry> pooled_ci(const std::vector<GeeFit>& fits, double level, int df,
                               bool rubin_variant) {
    check_layouts(fits);
    if (fits.size() < 2) throw UndefinedError("pooled_ci: needs at least 2 fits");
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("pooled_ci: level must lie in (0, 1)");
    if (df < 1) throw ConfigError("pooled_ci: df must be >= 1");

    const auto m = static_cast<double>(fits.size());
    const Index k = fits.front().coefficients().size();
    Vector mean = Vector::Zero(k);
    for (const GeeFit& f : fits) mean += f.coefficients() / m;
    Vector ss = Vector::Zero(k);
    Vector within = Vector::Zero(k);
    for (const GeeFit& f : fits) {
        const Vector b = f.coefficients();
        ss += (b - mean).cwiseAbs2();
        if (rubin_variant) within += f.robust_cov.diagonal() / m;
    }

    const double tq = student_t_quantile(1.0 - (1.0 - level) / 2.0, static_cast<double>(df));
    std::vector<std::string> names;
    names.push_back("intercept");
    for (const auto& n : fits.front().feature_names) names.push_back(n);
    for (const auto& n : fits.front().covariate_names) names.push_back(n);

    std::vector<CiEntry> table;
    for (Index j = 0; j < k; ++j) {
        double half;
        if (rubin_variant) {
            const double between = ss(j) / (m - 1.0);
            half = tq * std::sqrt(within(j) + (1.0 + 1.0 / m) * between);
        } else {
            const double s = std::sqrt(ss(j) / m);  // between-imputation spread, divisor M
            half = tq * s / std::sqrt(m);
        }
        table.push_back({names[static_cast<std::size_t>(j)], mean(j), mean(j) - half,
                         mean(j) + half, level});
    }
    return table;
}

Vector average_predictions(const std::vector<GeeFit>& fits, const Matrix& rows) {
    check_layouts(fits);
    Vector sum = Vector::Zero(rows.rows());
    for (const GeeFit& f : fits) sum += predict_mean(f, rows);
    return sum / static_cast<double>(fits.size());
}

Vector predict_pooled(const EnsembleModel& model, const Matrix& rows) {
    const auto q = static_cast<Index>(model.mask.selected_features.size());
    const Index c = model.pooled_covariate_coefs.size();
    if (rows.cols() != q + c)
        throw IntegrityError("predict_pooled: row width does not match the selected layout");
    Vector sel(q);
    for (Index k = 0; k < q; ++k)
        sel(k) = model.pooled_feature_coefs(model.mask.selected_features[static_cast<std::size_t>(k)]);
    Vector out(rows.rows());
    for (Index r = 0; r < rows.rows(); ++r) {
        const double eta = model.pooled_intercept + rows.row(r).head(q).dot(sel) +
                           rows.row(r).tail(c).dot(model.pooled_covariate_coefs);
        out(r) = link_inverse(model.link, eta);
    }
    return out;
}

}  // namespace longipred
