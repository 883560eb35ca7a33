// Acceptance suite: one line per criterion, nonzero exit if any fail.
// Every tolerance is pinned in code; Monte Carlo checks run under fixed seeds
// so the whole suite is deterministic.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <vector>

#include "longipred/config.hpp"
#include "longipred/harness.hpp"
#include "longipred/synthetic.hpp"
#include "oracles.hpp"

using namespace longipred;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Check {
public:
    void require(bool condition, const std::string& label) {
        ++total_;
        if (!condition) {
            ++failed_;
            if (!first_failure_.empty()) first_failure_ += "; ";
            first_failure_ += label;
        }
    }
    Outcome outcome(const std::string& summary) const {
        Outcome o;
        o.pass = failed_ == 0;
        std::ostringstream ss;
        if (o.pass) {
            ss << summary << " (" << total_ << " checks)";
        } else {
            ss << failed_ << "/" << total_ << " checks failed: " << first_failure_;
        }
        o.detail = ss.str();
        return o;
    }

private:
    int total_ = 0;
    int failed_ = 0;
    std::string first_failure_;
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

GeneratorConfig exchangeable_truth() {
    GeneratorConfig cfg = GeneratorConfig::defaults();
    cfg.n_subjects = 80;
    cfg.t_range = {10, 10};
    cfg.p_signal = 4;
    cfg.p_noise = 0;
    cfg.within_correlation = 0.5;
    cfg.noise_sd = 2.0;
    return cfg;
}

Vector truth_coefficients(const GeneratorConfig& cfg) {
    Vector beta(1 + cfg.true_feature_coefs.size() + cfg.true_covariate_coefs.size());
    beta(0) = cfg.true_intercept;
    beta.segment(1, cfg.true_feature_coefs.size()) = cfg.true_feature_coefs;
    beta.tail(cfg.true_covariate_coefs.size()) = cfg.true_covariate_coefs;
    return beta;
}

// mean/SE summary of replicated coefficient estimates against the truth
void check_three_se_recovery(Check& c, const std::vector<Vector>& estimates, const Vector& truth,
                             const std::string& tag) {
    const auto reps = static_cast<double>(estimates.size());
    Vector mean = Vector::Zero(truth.size());
    for (const Vector& b : estimates) mean += b / reps;
    Vector ss = Vector::Zero(truth.size());
    for (const Vector& b : estimates) ss += (b - mean).cwiseAbs2();
    for (Index j = 0; j < truth.size(); ++j) {
        const double se = std::sqrt(ss(j) / (reps - 1.0) / reps);
        const double bias = std::abs(mean(j) - truth(j));
        c.require(bias < 3.0 * se, tag + ": coordinate " + std::to_string(j) + " bias " +
                                       fmt(bias) + " vs 3*SE " + fmt(3.0 * se));
    }
}

// ---- criteria ----

Outcome criterion_efficiency() {
    Check c;
    const double value = efficiency(0.0142, 15);
    c.require(std::abs(value - 0.999054) < 1e-6, "efficiency(0.0142, 15) = " + fmt(value));
    c.require(std::abs(efficiency(0.0, 7) - 1.0) < 1e-15, "efficiency(0, m) = 1");
    return c.outcome("efficiency(0.0142, 15) = " + fmt(value));
}

Outcome criterion_gee_equals_ols() {
    Check c;
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        GeneratorConfig cfg = GeneratorConfig::defaults();
        cfg.n_subjects = 10 + rep % 15;
        cfg.t_range = {1, 3 + rep % 6};
        cfg.p_signal = 2 + rep % 3;
        cfg.p_noise = rep % 2;
        cfg.true_feature_coefs = Vector::LinSpaced(cfg.p_signal, 0.5, 2.0);
        cfg.noise_sd = 1.0 + 0.1 * (rep % 5);
        cfg.subject_intercept_sd = (rep % 3 == 0) ? 1.5 : 0.0;
        cfg.seed = static_cast<Seed>(10'000 + rep);
        const auto ds = generate(cfg).first;
        GeeOptions opt;
        opt.working = WorkingKind::independence;
        const Vector beta = fit_gee(ds, opt).coefficients();
        const Vector oracle = oracles::pooled_ols(ds);
        worst = std::max(worst, (beta - oracle).cwiseAbs().maxCoeff());
    }
    c.require(worst < 1e-8, "max |gee - ols| = " + fmt(worst));
    return c.outcome("100 datasets, max coefficient gap " + fmt(worst));
}

Outcome criterion_coefficient_recovery() {
    Check c;
    GeneratorConfig cfg = exchangeable_truth();
    const Vector truth = truth_coefficients(cfg);
    std::vector<Vector> estimates;
    double alpha_mean = 0.0;
    const int reps = 200;
    for (int rep = 0; rep < reps; ++rep) {
        cfg.seed = static_cast<Seed>(20'000 + rep);
        const auto ds = generate(cfg).first;
        const GeeFit fit = fit_gee(ds, {});
        estimates.push_back(fit.coefficients());
        alpha_mean += fit.working.alpha / reps;
    }
    check_three_se_recovery(c, estimates, truth, "exchangeable fit");
    c.require(std::abs(alpha_mean - 0.5) < 0.1, "mean alpha " + fmt(alpha_mean) + " vs 0.5 +-0.1");
    return c.outcome("200 replications, mean alpha " + fmt(alpha_mean));
}

Outcome criterion_misspecification() {
    Check c;
    GeneratorConfig cfg = exchangeable_truth();
    const Vector truth = truth_coefficients(cfg);
    for (WorkingKind kind : {WorkingKind::ar1, WorkingKind::independence}) {
        std::vector<Vector> estimates;
        const int reps = 500;
        for (int rep = 0; rep < reps; ++rep) {
            cfg.seed = static_cast<Seed>(30'000 + rep);
            GeeOptions opt;
            opt.working = kind;
            estimates.push_back(fit_gee(generate(cfg).first, opt).coefficients());
        }
        check_three_se_recovery(c, estimates, truth,
                                kind == WorkingKind::ar1 ? "ar1 on exchangeable truth"
                                                         : "independence on exchangeable truth");
    }
    return c.outcome("ar1 and independence both recover the truth over 500 replications");
}

Outcome criterion_sandwich_coverage() {
    Check c;
    GeneratorConfig cfg = exchangeable_truth();
    const Vector truth = truth_coefficients(cfg);
    const int reps = 500;
    const double z975 = 1.959963984540054;
    Eigen::VectorXi covered = Eigen::VectorXi::Zero(truth.size());
    for (int rep = 0; rep < reps; ++rep) {
        cfg.seed = static_cast<Seed>(40'000 + rep);
        const GeeFit fit = fit_gee(generate(cfg).first, {});
        const Vector beta = fit.coefficients();
        for (Index j = 0; j < truth.size(); ++j) {
            const double half = z975 * std::sqrt(fit.robust_cov(j, j));
            if (truth(j) >= beta(j) - half && truth(j) <= beta(j) + half) covered(j) += 1;
        }
    }
    double worst = 1.0;
    for (Index j = 0; j < truth.size(); ++j) {
        const double rate = static_cast<double>(covered(j)) / reps;
        worst = std::min(worst, rate);
        c.require(rate >= 0.92 && rate <= 0.98,
                  "coordinate " + std::to_string(j) + " coverage " + fmt(rate));
    }
    return c.outcome("95% robust CI coverage within [0.92, 0.98], minimum " + fmt(worst));
}

Outcome criterion_mi_correctness() {
    Check c;
    // invariants over 200 random datasets at three missingness levels
    int done = 0;
    for (double gamma : {0.01, 0.05, 0.2}) {
        for (int rep = 0; rep < 67 && done < 200; ++rep, ++done) {
            GeneratorConfig gen = GeneratorConfig::defaults();
            gen.n_subjects = 14 + rep % 10;
            gen.t_range = {2, 7};
            gen.missing_rate = gamma;
            gen.seed = static_cast<Seed>(50'000 + done);
            const auto ds = generate(gen).first;
            ImputationConfig imp;
            imp.m_imputations = 2;
            imp.n_cycles = 3;
            imp.n_donors = 3;
            imp.seed = static_cast<Seed>(60'000 + done);
            const ImputedSet a = mice_pmm(ds, imp);
            const ImputedSet b = mice_pmm(ds, imp);
            bool preserved = true, donors_ok = true, deterministic = true;
            for (Index j = 0; j < ds.n_columns(); ++j) {
                std::set<double> observed_values;
                for (Index r = 0; r < ds.rows(); ++r)
                    if (ds.observed()(r, j)) observed_values.insert(ds.cells()(r, j));
                for (std::size_t m = 0; m < a.datasets.size(); ++m) {
                    for (Index r = 0; r < ds.rows(); ++r) {
                        const double v = a.datasets[m].cells()(r, j);
                        if (ds.observed()(r, j)) {
                            preserved = preserved && v == ds.cells()(r, j);
                        } else {
                            donors_ok = donors_ok && observed_values.count(v) == 1;
                        }
                        deterministic = deterministic && v == b.datasets[m].cells()(r, j);
                    }
                }
            }
            c.require(preserved, "observed-cell preservation at gamma " + fmt(gamma));
            c.require(donors_ok, "donor membership at gamma " + fmt(gamma));
            c.require(deterministic, "determinism at gamma " + fmt(gamma));
        }
    }

    // accuracy stabilizes with M: across imputation seeds, the spread of test
    // accuracy at M=15 must not exceed the spread at M=1 (gamma = 0.05)
    GeneratorConfig gen = GeneratorConfig::defaults();
    gen.n_subjects = 30;
    gen.t_range = {2, 7};
    gen.subject_intercept_sd = 2.0;
    gen.noise_sd = 1.5;
    gen.missing_rate = 0.05;
    gen.seed = 777;
    const auto ds = generate(gen).first;
    const SplitSpec split = split_by_subject(ds, 0.7, 4242);
    const auto train = ds.filter_subjects(split.train_subjects);
    const auto test = ds.filter_subjects(split.test_subjects);
    ModelSettings settings;
    settings.imputation.n_cycles = 4;
    settings.imputation.n_donors = 3;
    settings.fine_tune = false;

    auto accuracy_spread = [&](int m_imputations) {
        std::vector<double> acc;
        for (int s = 0; s < 40; ++s) {
            ModelSettings ms = settings;
            ms.imputation.m_imputations = m_imputations;
            const TrainedModel trained = train_model(train, ms, static_cast<Seed>(70'000 + s));
            const auto forecasts = predict_dataset(trained.model, test, ms);
            acc.push_back(metrics(forecast_pairs(forecasts, MetricVariant::raw, false)).pearson_r);
        }
        double mean = 0.0;
        for (double a : acc) mean += a / static_cast<double>(acc.size());
        double ss = 0.0;
        for (double a : acc) ss += (a - mean) * (a - mean);
        return ss / (static_cast<double>(acc.size()) - 1.0);
    };
    const double var_m1 = accuracy_spread(1);
    const double var_m15 = accuracy_spread(15);
    c.require(var_m15 <= var_m1,
              "accuracy variance M=15 (" + fmt(var_m15) + ") vs M=1 (" + fmt(var_m1) + ")");
    return c.outcome("invariants on 200 datasets; accuracy variance " + fmt(var_m15) +
                     " at M=15 <= " + fmt(var_m1) + " at M=1");
}

Outcome criterion_pooling_and_ci() {
    Check c;
    // exact pooled mean
    std::mt19937_64 rng(4096);
    std::normal_distribution<double> norm(0.0, 3.0);
    std::vector<GeeFit> fits;
    Vector manual = Vector::Zero(3);
    SelectionMask mask;
    mask.selected_features = {0, 1};
    for (int m = 0; m < 15; ++m) {
        GeeFit fit;
        fit.intercept = norm(rng);
        fit.feature_coefs = Vector(2);
        fit.feature_coefs << norm(rng), norm(rng);
        fit.covariate_coefs = Vector(0);
        fit.feature_names = {"f1", "f2"};
        fit.robust_cov = Matrix::Identity(3, 3);
        manual += fit.coefficients();
        fits.push_back(std::move(fit));
    }
    manual /= 15.0;
    const EnsembleModel model = pool_parameters(fits, mask, {"f1", "f2"});
    c.require(std::abs(model.pooled_intercept - manual(0)) < 1e-12, "pooled intercept mean");
    c.require(std::abs(model.pooled_feature_coefs(0) - manual(1)) < 1e-12, "pooled coef 1 mean");
    c.require(std::abs(model.pooled_feature_coefs(1) - manual(2)) < 1e-12, "pooled coef 2 mean");

    // worked M=2 interval against the t-table oracle
    GeeFit a, b;
    a.intercept = 0.0;
    b.intercept = 2.0;
    a.feature_coefs = b.feature_coefs = Vector(0);
    a.covariate_coefs = b.covariate_coefs = Vector(0);
    a.robust_cov = b.robust_cov = Matrix::Identity(1, 1);
    const auto table = pooled_ci({a, b}, 0.95, 1);
    const double half = table[0].upper - table[0].estimate;
    const double expected = oracles::kT_1_975 / std::sqrt(2.0);
    c.require(std::abs(half - expected) < 1e-4,
              "M=2 half-width " + fmt(half) + " vs " + fmt(expected));
    c.require(std::abs(table[0].estimate - 1.0) < 1e-12, "M=2 center");

    // identity-link equality of the two ensembling routes
    std::vector<GeeFit> route_fits;
    for (int m = 0; m < 5; ++m) {
        GeeFit f;
        f.intercept = norm(rng);
        f.feature_coefs = Vector(2);
        f.feature_coefs << norm(rng), norm(rng);
        f.covariate_coefs = Vector(1);
        f.covariate_coefs << norm(rng);
        f.feature_names = {"f1", "f2"};
        f.covariate_names = {"z1"};
        f.robust_cov = Matrix::Identity(4, 4);
        route_fits.push_back(std::move(f));
    }
    SelectionMask route_mask;
    route_mask.selected_features = {0, 1};
    route_mask.selected_covariates = {0};
    const EnsembleModel pooled = pool_parameters(route_fits, route_mask, {"f1", "f2"});
    Matrix rows(8, 3);
    for (Index r = 0; r < rows.rows(); ++r)
        for (Index j = 0; j < rows.cols(); ++j) rows(r, j) = norm(rng);
    const Vector via_params = predict_pooled(pooled, rows);
    const Vector via_preds = average_predictions(route_fits, rows);
    const double gap = (via_params - via_preds).cwiseAbs().maxCoeff();
    c.require(gap < 1e-10, "ensembling route gap " + fmt(gap));
    return c.outcome("pooled mean exact, M=2 CI matches, route gap " + fmt(gap));
}

Outcome criterion_fine_tuning() {
    Check c;
    // worked example
    SubjectForecast fc;
    fc.subject_id = "k";
    fc.entries = {{1, 42.0, std::nullopt, std::nullopt, false, ""},
                  {2, 45.0, std::nullopt, std::nullopt, false, ""}};
    const auto tuned = fine_tune(fc, {1, 50.0});
    c.require(std::abs(*tuned.entries[1].y_hat_adjusted - 53.0) < 1e-15,
              "worked example 50/42/45 -> 53");
    c.require(std::abs(*tuned.entries[0].y_hat_adjusted - 42.0) < 1e-15,
              "tuning-time prediction stays raw");

    // offset constancy and trend preservation on pipeline forecasts
    GeneratorConfig gen = GeneratorConfig::defaults();
    gen.n_subjects = 24;
    gen.t_range = {2, 8};
    gen.subject_intercept_sd = 3.0;
    gen.missing_rate = 0.03;
    gen.seed = 99;
    const auto [ds, truth] = generate(gen);
    const SplitSpec split = split_by_subject(ds, 0.7, 1);
    ModelSettings settings;
    settings.imputation.m_imputations = 3;
    settings.imputation.n_cycles = 3;
    settings.imputation.n_donors = 3;
    const TrainedModel trained =
        train_model(ds.filter_subjects(split.train_subjects), settings, 4);
    const auto forecasts =
        predict_dataset(trained.model, ds.filter_subjects(split.test_subjects), settings);
    int tuned_subjects = 0;
    for (const SubjectForecast& f : forecasts) {
        if (!f.tuned) continue;
        ++tuned_subjects;
        std::optional<double> offset;
        for (const ForecastEntry& e : f.entries) {
            if (e.skipped || e.time_index == *f.tuning_time) continue;
            const double this_offset = *e.y_hat_adjusted - e.y_hat_raw;
            if (!offset) offset = this_offset;
            c.require(this_offset == *offset, "offset constancy");
        }
        std::vector<const ForecastEntry*> scored;
        for (const ForecastEntry& e : f.entries)
            if (!e.skipped && e.time_index != *f.tuning_time) scored.push_back(&e);
        for (std::size_t i = 1; i < scored.size(); ++i) {
            const double adj_diff = *scored[i]->y_hat_adjusted - *scored[i - 1]->y_hat_adjusted;
            const double raw_diff = scored[i]->y_hat_raw - scored[i - 1]->y_hat_raw;
            c.require(std::abs(adj_diff - raw_diff) < 1e-12, "trend preservation");
        }
    }
    c.require(tuned_subjects > 0, "at least one tuned subject in the pipeline check");
    return c.outcome("worked example plus invariants over " + std::to_string(tuned_subjects) +
                     " tuned subjects");
}

Outcome criterion_personalization_benefit() {
    Check c;
    auto summarize = [](const BootstrapReport& report, bool adjusted) {
        std::vector<double> values;
        for (const ReplicateResult& rep : report.per_replicate) {
            const auto& ms = adjusted ? rep.adjusted_longitudinal : rep.raw_longitudinal;
            if (!rep.failed && ms && ms->correlation_defined) values.push_back(ms->pearson_r);
        }
        double mean = 0.0;
        for (double v : values) mean += v / static_cast<double>(values.size());
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        const double se =
            std::sqrt(ss / (static_cast<double>(values.size()) - 1.0) /
                      static_cast<double>(values.size()));
        return std::make_pair(mean, se);
    };

    ModelSettings settings;
    settings.imputation.m_imputations = 3;
    settings.imputation.n_cycles = 3;
    settings.imputation.n_donors = 3;
    HarnessConfig harness;
    harness.n_boot = 200;
    harness.workers = 4;

    // signal-bearing data with subject-level offsets
    GeneratorConfig gen = GeneratorConfig::defaults();
    gen.n_subjects = 40;
    gen.t_range = {2, 8};
    gen.subject_intercept_sd = 3.0;
    gen.noise_sd = 1.5;
    gen.missing_rate = 0.03;
    gen.seed = 2025;
    harness.seed = 90'000;
    const BootstrapReport signal = bootstrap(generate(gen).first, settings, harness);
    const auto [raw_mean, raw_se] = summarize(signal, false);
    const auto [adj_mean, adj_se] = summarize(signal, true);
    c.require(adj_mean > raw_mean,
              "mean adjusted r " + fmt(adj_mean) + " > mean raw r " + fmt(raw_mean));
    c.require(raw_mean > 3.0 * raw_se, "raw mean exceeds 0 at 3 SE");
    c.require(adj_mean > 3.0 * adj_se, "adjusted mean exceeds 0 at 3 SE");

    // pure-noise outcomes: mean raw correlation must straddle zero
    GeneratorConfig null_gen = gen;
    null_gen.true_feature_coefs = Vector::Zero(4);
    null_gen.true_covariate_coefs = Vector::Zero(2);
    null_gen.subject_intercept_sd = 2.0;
    null_gen.noise_sd = 2.0;
    null_gen.seed = 2026;
    harness.seed = 91'000;
    const BootstrapReport null_report = bootstrap(generate(null_gen).first, settings, harness);
    const auto [null_mean, null_se] = summarize(null_report, false);
    c.require(std::abs(null_mean) <= 0.1, "null mean raw r " + fmt(null_mean) + " within +-0.1");
    return c.outcome("raw " + fmt(raw_mean) + ", adjusted " + fmt(adj_mean) + ", null " +
                     fmt(null_mean));
}

Outcome criterion_rmcorr() {
    Check c;
    std::mt19937_64 rng(31415);
    std::normal_distribution<double> norm(0.0, 1.0);
    double worst = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<std::vector<std::pair<double, double>>> by_subject;
        const int n_subjects = 3 + static_cast<int>(rng() % 8);
        for (int s = 0; s < n_subjects; ++s) {
            const int n = 2 + static_cast<int>(rng() % 6);
            const double level = 5.0 * norm(rng);
            std::vector<std::pair<double, double>> grp;
            for (int t = 0; t < n; ++t) {
                const double p = norm(rng);
                grp.emplace_back(level + 0.6 * p + 0.6 * norm(rng), level + p);
            }
            by_subject.push_back(std::move(grp));
        }
        const auto value = rmcorr(by_subject);
        if (!value) continue;
        worst = std::max(worst, std::abs(*value - oracles::rmcorr_ancova(by_subject)));
    }
    c.require(worst < 1e-10, "max |rmcorr - ancova oracle| = " + fmt(worst));

    // centered data: rmcorr equals pooled pearson
    double worst_centered = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<std::vector<std::pair<double, double>>> centered;
        std::vector<double> obs, pred;
        for (int s = 0; s < 5; ++s) {
            std::vector<std::pair<double, double>> raw;
            double mo = 0.0, mp = 0.0;
            const int n = 4;
            for (int t = 0; t < n; ++t) {
                const double p = norm(rng);
                const double o = 0.5 * p + 0.7 * norm(rng);
                raw.emplace_back(o, p);
                mo += o / n;
                mp += p / n;
            }
            std::vector<std::pair<double, double>> grp;
            for (const auto& [o, p] : raw) {
                grp.emplace_back(o - mo, p - mp);
                obs.push_back(o - mo);
                pred.push_back(p - mp);
            }
            centered.push_back(std::move(grp));
        }
        const double pooled = oracles::pearson_naive(obs, pred);
        worst_centered = std::max(worst_centered, std::abs(*rmcorr(centered) - pooled));
    }
    c.require(worst_centered < 1e-10,
              "max |rmcorr - pooled pearson on centered data| = " + fmt(worst_centered));
    return c.outcome("oracle gap " + fmt(worst) + ", centered gap " + fmt(worst_centered));
}

Outcome criterion_change_groups() {
    Check c;
    ModelSettings settings;
    settings.imputation.m_imputations = 2;
    settings.imputation.n_cycles = 2;
    settings.imputation.n_donors = 3;
    int agree = 0;
    int injected_total = 0;
    std::vector<SubjectForecast> last_forecasts;
    for (int rep = 0; rep < 50; ++rep) {
        GeneratorConfig gen = GeneratorConfig::defaults();
        gen.n_subjects = 12;
        gen.t_range = {5, 7};
        gen.true_feature_coefs << 0.8, 0.8, 0.8, 0.8;
        gen.noise_sd = 1.0;
        gen.missing_rate = 0.0;
        gen.seed = static_cast<Seed>(100'000 + rep);
        auto [ds, truth] = generate(gen);
        ds = inject_trend(ds, truth, 0.5, 1.0);
        const std::set<std::string> injected(truth.trend_subjects.begin(),
                                             truth.trend_subjects.end());
        const LoocvReport report = loocv(ds, settings, 0.5, static_cast<Seed>(110'000 + rep), 4);
        for (const ChangeAssignment& a : report.changes_raw.assignments) {
            if (!injected.count(a.subject_id)) continue;
            ++injected_total;
            if (a.delta_predicted > 0.0) ++agree;  // injected slope is positive
        }
        if (rep == 49) last_forecasts = report.forecasts;
    }
    const double rate = static_cast<double>(agree) / injected_total;
    c.require(rate >= 0.70, "sign agreement " + fmt(rate) + " over " +
                                std::to_string(injected_total) + " injected subjects");

    // tau sweep: stable counts weakly increase
    int previous = -1;
    for (double tau : {0.5, 1.0, 2.0, 3.0}) {
        const ChangeGroups g = classify_changes(last_forecasts, tau, MetricVariant::raw);
        int stable = 0;
        for (const auto& a : g.assignments)
            if (a.observed == ChangeLabel::stable) ++stable;
        c.require(stable >= previous, "stable count monotone at tau " + fmt(tau));
        previous = stable;
    }
    return c.outcome("sign agreement " + fmt(rate) + " on " + std::to_string(injected_total) +
                     " injected subjects; tau sweep monotone");
}

Outcome criterion_determinism_and_purity() {
    Check c;
    GeneratorConfig gen = GeneratorConfig::defaults();
    gen.n_subjects = 24;
    gen.t_range = {2, 7};
    gen.subject_intercept_sd = 2.0;
    gen.missing_rate = 0.05;
    gen.seed = 1234;
    const auto ds = generate(gen).first;

    ModelSettings settings;
    settings.imputation.m_imputations = 2;
    settings.imputation.n_cycles = 2;
    settings.imputation.n_donors = 3;
    HarnessConfig harness;
    harness.n_boot = 10;
    harness.seed = 777;

    harness.workers = 1;
    const BootstrapReport w1 = bootstrap(ds, settings, harness);
    harness.workers = 4;
    const BootstrapReport w4 = bootstrap(ds, settings, harness);
    c.require(to_json(w1).dump() == to_json(w4).dump(),
              "bootstrap report identical for 1 vs 4 workers");

    const LoocvReport l1 = loocv(ds, settings, 0.5, 555, 1);
    const LoocvReport l3 = loocv(ds, settings, 0.5, 555, 3);
    c.require(to_json(l1).dump() == to_json(l3).dump(),
              "loocv report identical for 1 vs 3 workers");

    // purity: skipped rows stay skipped (no test-side imputation), and
    // poisoning post-tuning-day outcomes changes no prediction
    const SplitSpec split = split_by_subject(ds, 0.7, 31);
    const auto train = ds.filter_subjects(split.train_subjects);
    const auto test = ds.filter_subjects(split.test_subjects);
    const TrainedModel trained = train_model(train, settings, 808);
    const auto forecasts = predict_dataset(trained.model, test, settings);

    int skipped = 0;
    for (Index s = 0; s < test.n_subjects(); ++s) {
        const SubjectSpan& span = test.subjects()[static_cast<std::size_t>(s)];
        for (Index r = span.begin; r < span.begin + span.count; ++r) {
            bool complete = true;
            for (Index k : trained.model.mask.selected_features)
                complete = complete && test.observed()(r, k);
            for (Index k : trained.model.mask.selected_covariates)
                complete = complete && test.observed()(r, test.n_features() + k);
            const auto& e = forecasts[static_cast<std::size_t>(s)]
                                .entries[static_cast<std::size_t>(r - span.begin)];
            c.require(e.skipped == !complete, "skip policy matches raw test completeness");
            skipped += e.skipped ? 1 : 0;
        }
    }

    Matrix poisoned = test.cells();
    for (std::size_t s = 0; s < forecasts.size(); ++s) {
        const SubjectSpan& span = test.subjects()[s];
        const int tuning_time =
            forecasts[s].tuned ? *forecasts[s].tuning_time : std::numeric_limits<int>::max();
        for (Index r = span.begin; r < span.begin + span.count; ++r)
            if (test.times()[static_cast<std::size_t>(r)] > tuning_time)
                poisoned(r, test.outcome_col()) = 1e30;
    }
    std::vector<std::string> subj(static_cast<std::size_t>(test.rows()));
    for (const SubjectSpan& sp : test.subjects())
        for (Index r = sp.begin; r < sp.begin + sp.count; ++r)
            subj[static_cast<std::size_t>(r)] = sp.id;
    const LongitudinalDataset poisoned_ds(subj, test.times(), poisoned, test.observed(),
                                          test.feature_names(), test.covariate_names(),
                                          test.outcome_name());
    const auto poisoned_forecasts = predict_dataset(trained.model, poisoned_ds, settings);
    bool identical = true;
    for (std::size_t i = 0; i < forecasts.size(); ++i) {
        for (std::size_t k = 0; k < forecasts[i].entries.size(); ++k) {
            const auto& a = forecasts[i].entries[k];
            const auto& b = poisoned_forecasts[i].entries[k];
            identical = identical && a.skipped == b.skipped;
            if (a.skipped) continue;
            identical = identical && a.y_hat_raw == b.y_hat_raw &&
                        a.y_hat_adjusted.has_value() == b.y_hat_adjusted.has_value() &&
                        (!a.y_hat_adjusted || *a.y_hat_adjusted == *b.y_hat_adjusted);
        }
    }
    c.require(identical, "poisoned post-tuning outcomes leave every prediction unchanged");
    return c.outcome("worker-count determinism plus purity audits (" + std::to_string(skipped) +
                     " rows skipped, never imputed)");
}

}  // namespace

int main() {
    using Clock = std::chrono::steady_clock;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"imputation-efficiency-closed-form", criterion_efficiency},
        {"gee-matches-least-squares-oracle", criterion_gee_equals_ols},
        {"gee-coefficient-and-alpha-recovery", criterion_coefficient_recovery},
        {"working-correlation-misspecification-robustness", criterion_misspecification},
        {"sandwich-confidence-interval-coverage", criterion_sandwich_coverage},
        {"multiple-imputation-invariants-and-stability", criterion_mi_correctness},
        {"parameter-pooling-and-pooled-ci", criterion_pooling_and_ci},
        {"day-one-fine-tuning-invariants", criterion_fine_tuning},
        {"bootstrap-personalization-benefit", criterion_personalization_benefit},
        {"repeated-measures-correlation-oracle", criterion_rmcorr},
        {"loocv-change-group-agreement", criterion_change_groups},
        {"determinism-and-test-purity", criterion_determinism_and_purity},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = Clock::now();
        Outcome outcome;
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome.pass = false;
            outcome.detail = std::string("exception: ") + e.what();
        }
        const double secs =
            std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count() /
            1000.0;
        std::printf("[%s] %2zu %-48s %7.1fs  %s\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                    criteria[i].first.c_str(), secs, outcome.detail.c_str());
        std::fflush(stdout);
        if (!outcome.pass) ++failures;
    }
    if (failures > 0) {
        std::printf("%d of %zu criteria FAILED\n", failures, criteria.size());
        return 1;
    }
    std::printf("all %zu criteria passed\n", criteria.size());
    return 0;
}
