#include <doctest.h>

#include <algorithm>
#include <set>

#include "longipred/gee.hpp"
#include "longipred/synthetic.hpp"
#include "oracles.hpp"

using namespace longipred;

TEST_CASE("zero missing rate produces a complete dataset") {
    GeneratorConfig cfg = GeneratorConfig::defaults();
    cfg.n_subjects = 10;
    cfg.seed = 1;
    const auto [ds, truth] = generate(cfg);
    CHECK(ds.complete());
    CHECK(missing_fraction(ds) == doctest::Approx(0.0));
    CHECK(ds.equals(truth.complete));
}

TEST_CASE("generation is deterministic per seed") {
    GeneratorConfig cfg = GeneratorConfig::defaults();
    cfg.n_subjects = 8;
    cfg.missing_rate = 0.1;
    cfg.seed = 42;
    const auto [a, ta] = generate(cfg);
    const auto [b, tb] = generate(cfg);
    CHECK(a.equals(b));
    CHECK(ta.complete.equals(tb.complete));
    cfg.seed = 43;
    const auto [c, tc] = generate(cfg);
    CHECK_FALSE(a.equals(c));
}

TEST_CASE("noiseless outcomes are exactly linear and identifiable") {
    GeneratorConfig cfg = GeneratorConfig::defaults();
    cfg.n_subjects = 25;
    cfg.t_range = {2, 6};
    cfg.noise_sd = 0.0;
    cfg.subject_intercept_sd = 0.0;
    cfg.seed = 5;
    const auto [ds, truth] = generate(cfg);
    GeeOptions opt;
    opt.working = WorkingKind::independence;
    const GeeFit fit = fit_gee(ds, opt);
    CHECK(fit.intercept == doctest::Approx(cfg.true_intercept).epsilon(1e-8));
    for (Index j = 0; j < cfg.p_signal; ++j)
        CHECK(fit.feature_coefs(j) == doctest::Approx(cfg.true_feature_coefs(j)).epsilon(1e-8));
    for (Index j = cfg.p_signal; j < ds.n_features(); ++j)
        CHECK(fit.feature_coefs(j) == doctest::Approx(0.0).scale(1.0).epsilon(1e-8));
}

TEST_CASE("realized missing fraction tracks the requested rate at paper scale") {
    GeneratorConfig cfg = GeneratorConfig::defaults();
    cfg.n_subjects = 76;
    cfg.t_range = {1, 23};
    cfg.p_signal = 4;
    cfg.p_noise = 49;  // 53 features total
    cfg.true_feature_coefs = Vector::LinSpaced(4, 1.0, 2.0);
    cfg.missing_rate = 0.0142;
    double sum = 0.0;
    const int reps = 100;
    for (int rep = 0; rep < reps; ++rep) {
        cfg.seed = static_cast<Seed>(rep);
        const auto [ds, truth] = generate(cfg);
        sum += missing_fraction(ds);
    }
    CHECK(sum / reps == doctest::Approx(0.0142).epsilon(0.35));  // +-0.005
}

TEST_CASE("masking never touches covariates and is MAR in the age covariate") {
    GeneratorConfig cfg = GeneratorConfig::defaults();
    cfg.n_subjects = 60;
    cfg.t_range = {2, 8};
    cfg.missing_rate = 0.2;
    cfg.seed = 17;
    const auto [ds, truth] = generate(cfg);
    const Index p = ds.n_features();
    for (Index r = 0; r < ds.rows(); ++r)
        for (Index j = p; j < ds.outcome_col(); ++j) CHECK(ds.observed()(r, j));

    // Missingness should rise with age: compare rates in the lower and upper
    // age halves.
    std::vector<std::pair<double, double>> by_row;  // (age, missing share of maskable cells)
    for (Index r = 0; r < ds.rows(); ++r) {
        int missing = 0;
        for (Index j = 0; j < p; ++j) missing += ds.observed()(r, j) ? 0 : 1;
        missing += ds.observed()(r, ds.outcome_col()) ? 0 : 1;
        by_row.emplace_back(ds.cells()(r, p), static_cast<double>(missing) / (p + 1));
    }
    std::sort(by_row.begin(), by_row.end());
    double lower = 0.0, upper = 0.0;
    const std::size_t half = by_row.size() / 2;
    for (std::size_t i = 0; i < half; ++i) lower += by_row[i].second;
    for (std::size_t i = half; i < by_row.size(); ++i) upper += by_row[i].second;
    CHECK(upper / static_cast<double>(by_row.size() - half) >
          lower / static_cast<double>(half));
}

TEST_CASE("ground truth records the marginal exchangeable correlation") {
    GeneratorConfig cfg = GeneratorConfig::defaults();
    cfg.subject_intercept_sd = 2.0;
    cfg.within_correlation = 0.3;
    cfg.noise_sd = 1.0;
    cfg.seed = 3;
    const auto [ds, truth] = generate(cfg);
    const double expected = (4.0 + 0.3) / 5.0;
    CHECK(truth.marginal_alpha == doctest::Approx(expected));
}

TEST_CASE("zero-slope trend injection changes nothing") {
    GeneratorConfig cfg = GeneratorConfig::defaults();
    cfg.n_subjects = 10;
    cfg.seed = 21;
    auto [ds, truth] = generate(cfg);
    const auto after = inject_trend(ds, truth, 0.5, 0.0);
    CHECK(after.equals(ds));
    CHECK(truth.trend_subjects.empty());
}

TEST_CASE("full-fraction injection adds slope*t and pushes every subject past tau") {
    // Small feature coefficients keep the feature-driven part of the observed
    // change well below the injected trend.
    GeneratorConfig cfg = GeneratorConfig::defaults();
    cfg.n_subjects = 15;
    cfg.t_range = {6, 6};
    cfg.true_feature_coefs << 0.1, 0.1, 0.1, 0.1;
    cfg.noise_sd = 0.0;
    cfg.subject_intercept_sd = 0.0;
    cfg.seed = 8;
    auto [ds, truth] = generate(cfg);
    const LongitudinalDataset before = ds;
    const double tau = 0.5;
    const double slope = 1.0;
    const auto trended = inject_trend(ds, truth, 1.0, slope);
    CHECK(truth.trend_subjects.size() == 15);

    // The outcome shift is exactly slope * t and the mean structure still
    // explains the shifted outcome through the shifted features.
    const Vector& alpha = truth.config.true_feature_coefs;
    for (const SubjectSpan& s : trended.subjects()) {
        for (Index r = s.begin; r < s.begin + s.count; ++r) {
            const double t = trended.times()[static_cast<std::size_t>(r)];
            CHECK(trended.cells()(r, trended.outcome_col()) -
                      before.cells()(r, before.outcome_col()) ==
                  doctest::Approx(slope * t).epsilon(1e-12));
            const double mean = cfg.true_intercept +
                                trended.cells().row(r).head(alpha.size()).dot(alpha) +
                                trended.covariates().row(r).dot(cfg.true_covariate_coefs);
            CHECK(trended.cells()(r, trended.outcome_col()) == doctest::Approx(mean).epsilon(1e-9));
        }
        const double delta = trended.cells()(s.begin + s.count - 1, trended.outcome_col()) -
                             trended.cells()(s.begin, trended.outcome_col());
        CHECK(delta > tau);
    }
}

TEST_CASE("injected and untouched subjects separate cleanly") {
    GeneratorConfig cfg = GeneratorConfig::defaults();
    cfg.n_subjects = 40;
    cfg.t_range = {5, 9};
    cfg.true_feature_coefs << 0.5, 0.5, 0.5, 0.5;
    cfg.noise_sd = 1.0;
    cfg.seed = 13;
    auto [ds, truth] = generate(cfg);
    const auto trended = inject_trend(ds, truth, 0.5, 1.0);
    const std::set<std::string> injected(truth.trend_subjects.begin(), truth.trend_subjects.end());
    CHECK(injected.size() == 20);

    // AUC of observed end-minus-baseline change as a separator
    std::vector<double> pos, neg;
    for (const SubjectSpan& s : trended.subjects()) {
        const double delta = trended.cells()(s.begin + s.count - 1, trended.outcome_col()) -
                             trended.cells()(s.begin, trended.outcome_col());
        (injected.count(s.id) ? pos : neg).push_back(delta);
    }
    double wins = 0.0;
    for (double a : pos)
        for (double b : neg) wins += a > b ? 1.0 : (a == b ? 0.5 : 0.0);
    const double auc = wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
    CHECK(auc > 0.9);
}

TEST_CASE("invalid generator configurations are rejected") {
    GeneratorConfig cfg = GeneratorConfig::defaults();
    cfg.missing_rate = 1.0;
    CHECK_THROWS_AS(static_cast<void>(generate(cfg)), ConfigError);
    cfg = GeneratorConfig::defaults();
    cfg.t_range = {3, 2};
    CHECK_THROWS_AS(static_cast<void>(generate(cfg)), ConfigError);
    cfg = GeneratorConfig::defaults();
    cfg.true_feature_coefs = Vector::Zero(2);
    CHECK_THROWS_AS(static_cast<void>(generate(cfg)), ConfigError);
}
