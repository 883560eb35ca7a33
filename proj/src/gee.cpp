#include "longipred/gee.hpp"

#include <cmath>

namespace longipred {

namespace {

constexpr double kAlphaMargin = 1e-6;
constexpr double kPhiFloor = 1e-12;

struct SubjectBlock {
    Index begin = 0;
    Index count = 0;
};

// Moment estimates of dispersion and the working correlation parameter from
// the current residuals. Standardized residuals carry the full sqrt(phi)
// scale, so alpha estimates are plain averages of their products.
struct Moments {
    double phi = 1.0;
    double alpha = 0.0;
    bool clamped = false;
};

Moments estimate_moments(const Vector& resid, const std::vector<SubjectBlock>& blocks,
                         WorkingKind kind, Index n_coefs, Index max_t) {
    Moments m;
    const auto n = static_cast<double>(resid.size());
    const double denom = std::max(1.0, n - static_cast<double>(n_coefs));
    m.phi = std::max(resid.squaredNorm() / denom, kPhiFloor);
    if (kind == WorkingKind::independence) return m;

    const Vector std_resid = resid / std::sqrt(m.phi);
    double sum = 0.0;
    std::int64_t pairs = 0;
    for (const SubjectBlock& b : blocks) {
        if (b.count < 2) continue;
        const auto r = std_resid.segment(b.begin, b.count);
        if (kind == WorkingKind::exchangeable) {
            const double s = r.sum();
            sum += 0.5 * (s * s - r.squaredNorm());
            pairs += static_cast<std::int64_t>(b.count) * (b.count - 1) / 2;
        } else {  // ar1: lag-1 products
            sum += r.head(b.count - 1).dot(r.tail(b.count - 1));
            pairs += b.count - 1;
        }
    }
    if (pairs == 0) return m;
    double alpha = sum / static_cast<double>(pairs);

    const double lo = kind == WorkingKind::exchangeable && max_t > 1
                          ? -1.0 / static_cast<double>(max_t - 1) + kAlphaMargin
                          : -1.0 + kAlphaMargin;
    const double hi = 1.0 - kAlphaMargin;
    if (alpha < lo || alpha > hi) {
        alpha = std::clamp(alpha, lo, hi);
        m.clamped = true;
    }
    m.alpha = alpha;
    return m;
}

}  // namespace

GeeFit fit_gee(const LongitudinalDataset& train, const GeeOptions& options) {
    if (options.max_iter < 1) throw ConfigError("fit_gee: max_iter must be >= 1");
    if (!(options.tol > 0.0)) throw ConfigError("fit_gee: tol must be positive");
    if (!train.complete()) throw IntegrityError("fit_gee: dataset has missing cells");
    if (train.rows() == 0) throw SizeError("fit_gee: dataset is empty");

    const Index n = train.rows();
    const Index q = train.n_features();
    const Index c = train.n_covariates();
    const Index k = 1 + q + c;

    Matrix design(n, k);
    design.col(0).setOnes();
    design.middleCols(1, q) = train.features();
    design.rightCols(c) = train.covariates();
    const Vector y = train.outcome();

    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    if (qr.rank() < k)
        throw DegenerateDesignError("fit_gee: design matrix is rank-deficient (rank " +
                                    std::to_string(qr.rank()) + " of " + std::to_string(k) + ")");
    Vector beta = qr.solve(y);

    std::vector<SubjectBlock> blocks;
    Index max_t = 1;
    for (const SubjectSpan& s : train.subjects()) {
        blocks.push_back({s.begin, s.count});
        max_t = std::max(max_t, s.count);
    }

    GeeFit fit;
    fit.link = options.link;
    fit.working.kind = options.working;
    fit.feature_names = train.feature_names();
    fit.covariate_names = train.covariate_names();

    Moments moments;
    bool alpha_was_clamped = false;
    int iter = 0;
    for (; iter < options.max_iter; ++iter) {
        const Vector eta = design * beta;
        Vector mu(n), deriv(n);
        for (Index r = 0; r < n; ++r) {
            mu(r) = link_inverse(options.link, eta(r));
            deriv(r) = link_mean_derivative(options.link, eta(r));
        }
        const Vector resid = y - mu;
        moments = estimate_moments(resid, blocks, options.working, k, max_t);
        alpha_was_clamped = alpha_was_clamped || moments.clamped;

        // One Fisher-scoring step: beta += (sum D'V^-1 D)^-1 sum D'V^-1 (y - mu),
        // accumulated per subject so only T_i x T_i systems are ever solved.
        Matrix info = Matrix::Zero(k, k);
        Vector score = Vector::Zero(k);
        for (const SubjectBlock& b : blocks) {
            const Matrix d_i = deriv.segment(b.begin, b.count).asDiagonal() *
                               design.middleRows(b.begin, b.count);
            const Matrix v_i = moments.phi * working_matrix(options.working, moments.alpha, b.count);
            const Eigen::LDLT<Matrix> solver(v_i);
            const Matrix vinv_d = solver.solve(d_i);
            info.noalias() += d_i.transpose() * vinv_d;
            score.noalias() += vinv_d.transpose() * resid.segment(b.begin, b.count);
        }
        const Vector step = info.ldlt().solve(score);
        beta += step;
        if (step.cwiseAbs().maxCoeff() < options.tol) {
            fit.converged = true;
            ++iter;
            break;
        }
    }
    fit.n_iterations = iter;
    if (!fit.converged)
        fit.warnings.push_back("fit_gee: not converged after " + std::to_string(iter) +
                               " iterations");
    if (alpha_was_clamped)
        fit.warnings.push_back("fit_gee: working correlation estimate clamped to its validity range");

    // Sandwich covariance B^-1 M B^-1 at the final coefficients.
    const Vector eta = design * beta;
    Vector mu(n), deriv(n);
    for (Index r = 0; r < n; ++r) {
        mu(r) = link_inverse(options.link, eta(r));
        deriv(r) = link_mean_derivative(options.link, eta(r));
    }
    const Vector resid = y - mu;
    moments = estimate_moments(resid, blocks, options.working, k, max_t);
    Matrix bread = Matrix::Zero(k, k);
    Matrix meat = Matrix::Zero(k, k);
    for (const SubjectBlock& b : blocks) {
        const Matrix d_i = deriv.segment(b.begin, b.count).asDiagonal() *
                           design.middleRows(b.begin, b.count);
        const Matrix v_i = moments.phi * working_matrix(options.working, moments.alpha, b.count);
        const Eigen::LDLT<Matrix> solver(v_i);
        const Matrix vinv_d = solver.solve(d_i);
        bread.noalias() += d_i.transpose() * vinv_d;
        const Vector u = vinv_d.transpose() * resid.segment(b.begin, b.count);
        meat.noalias() += u * u.transpose();
    }
    const Matrix bread_inv = bread.ldlt().solve(Matrix::Identity(k, k));
    fit.robust_cov = bread_inv * meat * bread_inv;
    fit.robust_cov = 0.5 * (fit.robust_cov + fit.robust_cov.transpose()).eval();

    fit.intercept = beta(0);
    fit.feature_coefs = beta.segment(1, q);
    fit.covariate_coefs = beta.tail(c);
    fit.dispersion = moments.phi;
    fit.working.alpha = options.working == WorkingKind::independence ? 0.0 : moments.alpha;
    return fit;
}

Vector predict_mean(const GeeFit& fit, const Matrix& rows) {
    const Index q = fit.feature_coefs.size();
    const Index c = fit.covariate_coefs.size();
    if (rows.cols() != q + c)
        throw IntegrityError("predict_mean: row width " + std::to_string(rows.cols()) +
                             " does not match coefficient layout " + std::to_string(q + c));
    Vector out(rows.rows());
    for (Index r = 0; r < rows.rows(); ++r) {
        const double eta = fit.intercept + rows.row(r).head(q).dot(fit.feature_coefs) +
                           rows.row(r).tail(c).dot(fit.covariate_coefs);
        out(r) = link_inverse(fit.link, eta);
    }
    return out;
}

}  // namespace longipred
