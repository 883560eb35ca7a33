#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "longipred/errors.hpp"

namespace longipred {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Sample Pearson correlation of two equally sized vector expressions.
/// Returns NaN when either argument has zero variance.
template <typename DA, typename DB>
double pearson(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
    const Index n = a.size();
    if (n != b.size() || n < 2) return std::numeric_limits<double>::quiet_NaN();
    using ScalarA = typename DA::Scalar;
    const ScalarA ma = a.mean();
    const ScalarA mb = b.mean();
    const auto da = (a.array() - ma).matrix().eval();
    const auto db = (b.array() - mb).matrix().eval();
    const double sxx = da.squaredNorm();
    const double syy = db.squaredNorm();
    if (sxx <= 0.0 || syy <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return da.dot(db) / std::sqrt(sxx * syy);
}

/// Average ranks (1-based, ties share the mean rank).
std::vector<double> average_ranks(const std::vector<double>& values);

/// Spearman rank correlation with average-rank tie handling.
double spearman(const std::vector<double>& a, const std::vector<double>& b);

/// Regularized incomplete beta function I_x(a, b).
double reg_incomplete_beta(double a, double b, double x);

/// CDF of Student's t with `df` degrees of freedom.
double student_t_cdf(double t, double df);

/// Quantile of Student's t: smallest t with CDF(t) >= p.
double student_t_quantile(double p, double df);

/// Two-sided p-value for a Pearson correlation based on n pairs.
double correlation_p_value(double rho, Index n);

}  // namespace longipred
