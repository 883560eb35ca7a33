#pragma once

#include <string>
#include <vector>

#include "longipred/dataset.hpp"

namespace longipred {

enum class Link { identity, logit };

/// g: mean -> linear predictor.
template <typename Scalar>
Scalar link_eval(Link link, Scalar mu) {
    if (link == Link::identity) return mu;
    return std::log(mu / (Scalar(1) - mu));
}

/// g^-1: linear predictor -> mean.
template <typename Scalar>
Scalar link_inverse(Link link, Scalar eta) {
    if (link == Link::identity) return eta;
    return Scalar(1) / (Scalar(1) + std::exp(-eta));
}

/// d g^-1 / d eta.
template <typename Scalar>
Scalar link_mean_derivative(Link link, Scalar eta) {
    if (link == Link::identity) return Scalar(1);
    const Scalar mu = link_inverse(link, eta);
    return mu * (Scalar(1) - mu);
}

enum class WorkingKind { independence, exchangeable, ar1 };

struct WorkingCorrelation {
    WorkingKind kind = WorkingKind::exchangeable;
    double alpha = 0.0;  // unused for independence
};

/// The T x T working correlation matrix R(alpha) for one subject.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> working_matrix(WorkingKind kind, Scalar alpha,
                                                                     Index t) {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Mat r = Mat::Identity(t, t);
    if (kind == WorkingKind::independence || t == 1) return r;
    for (Index i = 0; i < t; ++i) {
        for (Index j = i + 1; j < t; ++j) {
            const Scalar v = kind == WorkingKind::exchangeable
                                 ? alpha
                                 : Scalar(std::pow(static_cast<double>(alpha),
                                                   static_cast<double>(j - i)));
            r(i, j) = v;
            r(j, i) = v;
        }
    }
    return r;
}

/// Result of one GEE fit on a complete dataset.
struct GeeFit {
    double intercept = 0.0;
    Vector feature_coefs;    // over the dataset's (selected) feature columns
    Vector covariate_coefs;  // over its covariate columns
    double dispersion = 1.0;
    WorkingCorrelation working;
    Matrix robust_cov;  // (1 + q + c) square, sandwich estimator
    int n_iterations = 0;
    bool converged = false;
    Link link = Link::identity;
    std::vector<std::string> feature_names;
    std::vector<std::string> covariate_names;
    std::vector<std::string> warnings;

    /// Stacked coefficient vector [intercept, features, covariates].
    Vector coefficients() const {
        Vector b(1 + feature_coefs.size() + covariate_coefs.size());
        b(0) = intercept;
        b.segment(1, feature_coefs.size()) = feature_coefs;
        b.tail(covariate_coefs.size()) = covariate_coefs;
        return b;
    }
};

struct GeeOptions {
    Link link = Link::identity;
    WorkingKind working = WorkingKind::exchangeable;
    double tol = 1e-8;
    int max_iter = 100;
};

/// Solves the GEE score equations sum_i D_i' V_i^-1 (y_i - mu_i) = 0 by Fisher
/// scoring, with V_i = Delta_i^(1/2) R_i(alpha) Delta_i^(1/2) and alpha, phi
/// re-estimated from standardized residuals at every step. Gaussian variance
/// function; initial coefficients come from the pooled least-squares fit.
GeeFit fit_gee(const LongitudinalDataset& train, const GeeOptions& options = {});

/// Mean response g^-1(mu + x'alpha + z'gamma) for rows laid out as
/// [features | covariates] matching the fit's coefficient layout.
Vector predict_mean(const GeeFit& fit, const Matrix& rows);

}  // namespace longipred
