#include "longipred/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "longipred/gee.hpp"

namespace longipred {

namespace {

constexpr double kMaxCellMissProb = 0.9;

std::string padded_id(int i, int width = 3) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "s%0*d", width, i);
    return buf;
}

}  // namespace

void GeneratorConfig::validate() const {
    if (n_subjects < 1) throw ConfigError("generator: n_subjects must be >= 1");
    if (t_range.first < 1 || t_range.second < t_range.first)
        throw ConfigError("generator: t_range must satisfy 1 <= min <= max");
    if (p_signal < 0 || p_noise < 0 || p_signal + p_noise < 1)
        throw ConfigError("generator: need at least one feature");
    if (true_feature_coefs.size() != p_signal)
        throw ConfigError("generator: true_feature_coefs must have length p_signal");
    if (!(missing_rate >= 0.0 && missing_rate < 1.0))
        throw ConfigError("generator: missing_rate must lie in [0, 1)");
    if (noise_sd < 0.0 || subject_intercept_sd < 0.0)
        throw ConfigError("generator: standard deviations must be non-negative");
    const int max_t = t_range.second;
    const double lo = max_t > 1 ? -1.0 / static_cast<double>(max_t - 1) : -1.0;
    if (!(within_correlation > lo && within_correlation < 1.0) && within_correlation != 0.0)
        throw ConfigError("generator: within_correlation outside the exchangeable range for max T");
}

GeneratorConfig GeneratorConfig::defaults() {
    GeneratorConfig cfg;
    cfg.true_feature_coefs = Vector::Zero(cfg.p_signal);
    cfg.true_feature_coefs << 3.0, -2.0, 1.5, 1.0;
    cfg.true_covariate_coefs = Vector::Zero(2);
    cfg.true_covariate_coefs << 0.2, 1.0;
    return cfg;
}

std::pair<LongitudinalDataset, GroundTruth> generate(const GeneratorConfig& cfg) {
    cfg.validate();
    const Index p = cfg.p_signal + cfg.p_noise;
    const auto c = static_cast<Index>(cfg.true_covariate_coefs.size());

    std::vector<std::string> feature_names;
    for (Index j = 0; j < p; ++j)
        feature_names.push_back((j < cfg.p_signal ? "sig" : "noise") +
                                std::to_string(j < cfg.p_signal ? j + 1 : j - cfg.p_signal + 1));
    std::vector<std::string> covariate_names;
    for (Index j = 0; j < c; ++j)
        covariate_names.push_back(j == 0 ? "age" : (j == 1 ? "sex" : "cov" + std::to_string(j + 1)));

    auto rng = make_rng(cfg.seed, "generator");
    std::normal_distribution<double> norm(0.0, 1.0);

    GroundTruth truth;
    truth.config = cfg;
    truth.subject_intercepts = Vector::Zero(cfg.n_subjects);

    std::vector<Observation> rows;
    std::vector<double> ages(static_cast<std::size_t>(cfg.n_subjects));
    for (int i = 0; i < cfg.n_subjects; ++i) {
        const int span = cfg.t_range.second - cfg.t_range.first + 1;
        const int t_count = cfg.t_range.first + static_cast<int>(bounded(rng, static_cast<std::uint64_t>(span)));
        const double b_i = cfg.subject_intercept_sd * norm(rng);
        truth.subject_intercepts(i) = b_i;

        Vector z(c);
        for (Index j = 0; j < c; ++j) {
            if (j == 0) {
                z(j) = 45.0 + 10.0 * norm(rng);  // age-like
            } else if (j == 1) {
                z(j) = static_cast<double>(bounded(rng, 2));  // sex-like 0/1
            } else {
                z(j) = norm(rng);
            }
        }
        ages[static_cast<std::size_t>(i)] = c > 0 ? z(0) : 0.0;

        // Exchangeable noise via the Cholesky factor of R(alpha), supporting
        // the full valid range including negative alpha.
        Matrix r_alpha = working_matrix(WorkingKind::exchangeable, cfg.within_correlation, t_count);
        Vector u(t_count);
        for (int t = 0; t < t_count; ++t) u(t) = norm(rng);
        Vector eps = Eigen::LLT<Matrix>(r_alpha).matrixL() * u;
        eps *= cfg.noise_sd;

        for (int t = 1; t <= t_count; ++t) {
            Observation o;
            o.subject_id = padded_id(i + 1);
            o.time_index = t;
            Vector x(p);
            for (Index j = 0; j < p; ++j) x(j) = norm(rng);
            const double mean = cfg.true_intercept + x.head(cfg.p_signal).dot(cfg.true_feature_coefs) +
                                z.dot(cfg.true_covariate_coefs);
            const double y = mean + b_i + eps(t - 1);
            for (Index j = 0; j < p; ++j) o.features.emplace_back(x(j));
            for (Index j = 0; j < c; ++j) o.covariates.emplace_back(z(j));
            o.outcome = y;
            rows.push_back(std::move(o));
        }
    }

    truth.complete = LongitudinalDataset::from_observations(rows, feature_names, covariate_names,
                                                            "score");

    const double var_noise = cfg.noise_sd * cfg.noise_sd;
    const double var_subj = cfg.subject_intercept_sd * cfg.subject_intercept_sd;
    const double var_total = var_noise + var_subj;
    truth.marginal_alpha =
        var_total > 0.0 ? (var_subj + cfg.within_correlation * var_noise) / var_total : 0.0;

    if (cfg.missing_rate <= 0.0) return {truth.complete, truth};

    // MAR masking: per-cell probabilities proportional to a logistic weight of
    // the subject's (observed, never masked) age, calibrated so the realized
    // missing fraction over ALL cells matches missing_rate in expectation.
    const LongitudinalDataset& full = truth.complete;
    const Index n = full.rows();
    const Index maskable = p + 1;  // features + outcome; covariates drive the mechanism
    const double age_mean =
        std::accumulate(ages.begin(), ages.end(), 0.0) / static_cast<double>(ages.size());
    double age_ss = 0.0;
    for (double a : ages) age_ss += (a - age_mean) * (a - age_mean);
    const double age_sd = ages.size() > 1 ? std::sqrt(age_ss / static_cast<double>(ages.size() - 1)) : 1.0;

    std::vector<double> weight(static_cast<std::size_t>(n));
    double weight_sum = 0.0;
    for (Index r = 0; r < n; ++r) {
        // logistic weight of the (always observed) age covariate; uniform
        // masking when the configuration carries no covariates
        const double age = c > 0 ? full.cells()(r, p) : 0.0;
        const double z_std = age_sd > 0.0 ? (age - age_mean) / age_sd : 0.0;
        weight[static_cast<std::size_t>(r)] = 1.0 / (1.0 + std::exp(-z_std));
        weight_sum += weight[static_cast<std::size_t>(r)];
    }
    const double target_per_maskable = cfg.missing_rate * static_cast<double>(p + c + 1) /
                                       static_cast<double>(maskable);
    const double mean_weight = weight_sum / static_cast<double>(n);

    auto mask_rng = make_rng(cfg.seed, "mar-mask");
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Matrix cells = full.cells();
    BoolArray obs = full.observed();
    for (Index r = 0; r < n; ++r) {
        const double prob = std::min(kMaxCellMissProb,
                                     target_per_maskable * weight[static_cast<std::size_t>(r)] / mean_weight);
        for (Index j = 0; j < p; ++j)
            if (unif(mask_rng) < prob) obs(r, j) = false;
        if (unif(mask_rng) < prob) obs(r, full.outcome_col()) = false;
    }
    std::vector<std::string> subj(static_cast<std::size_t>(n));
    for (const SubjectSpan& s : full.subjects())
        for (Index r = s.begin; r < s.begin + s.count; ++r) subj[static_cast<std::size_t>(r)] = s.id;
    LongitudinalDataset masked(std::move(subj), full.times(), std::move(cells), std::move(obs),
                               feature_names, covariate_names, "score");
    return {std::move(masked), std::move(truth)};
}

LongitudinalDataset inject_trend(const LongitudinalDataset& ds, GroundTruth& truth,
                                 double subject_fraction, double slope) {
    if (!(subject_fraction >= 0.0 && subject_fraction <= 1.0))
        throw ConfigError("inject_trend: subject_fraction must lie in [0, 1]");
    truth.trend_slope = slope;
    truth.trend_subjects.clear();
    if (slope == 0.0 || subject_fraction == 0.0) return ds;

    const Index n_subj = ds.n_subjects();
    const auto n_pick = static_cast<Index>(std::lround(subject_fraction * static_cast<double>(n_subj)));
    std::vector<Index> order(static_cast<std::size_t>(n_subj));
    std::iota(order.begin(), order.end(), Index{0});
    auto rng = make_rng(truth.config.seed, "inject-trend");
    for (Index i = n_subj - 1; i > 0; --i) {
        const auto j = static_cast<Index>(bounded(rng, static_cast<std::uint64_t>(i) + 1));
        std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
    }

    const Vector& coefs = truth.config.true_feature_coefs;
    const double coef_norm2 = coefs.squaredNorm();
    Matrix cells = ds.cells();
    Matrix truth_cells = truth.complete.cells();
    for (Index k = 0; k < n_pick; ++k) {
        const SubjectSpan& span = ds.subjects()[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])];
        truth.trend_subjects.push_back(span.id);
        for (Index r = span.begin; r < span.begin + span.count; ++r) {
            const double shift = slope * static_cast<double>(ds.times()[static_cast<std::size_t>(r)]);
            cells(r, ds.outcome_col()) += shift;
            truth_cells(r, ds.outcome_col()) += shift;
            if (coef_norm2 > 0.0) {
                for (Index j = 0; j < coefs.size(); ++j) {
                    cells(r, j) += shift * coefs(j) / coef_norm2;
                    truth_cells(r, j) += shift * coefs(j) / coef_norm2;
                }
            }
        }
    }
    std::sort(truth.trend_subjects.begin(), truth.trend_subjects.end());

    std::vector<std::string> subj(static_cast<std::size_t>(ds.rows()));
    for (const SubjectSpan& s : ds.subjects())
        for (Index r = s.begin; r < s.begin + s.count; ++r) subj[static_cast<std::size_t>(r)] = s.id;
    truth.complete = truth.complete.with_complete_cells(std::move(truth_cells));
    LongitudinalDataset out(std::move(subj), ds.times(), std::move(cells), ds.observed(),
                            ds.feature_names(), ds.covariate_names(), ds.outcome_name());
    return out;
}

}  // namespace longipred
