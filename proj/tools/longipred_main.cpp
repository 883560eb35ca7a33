// Command-line front end: config-driven subcommands over the longipred
// library, with deterministic seeding and machine-readable outputs.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>

#include "longipred/config.hpp"
#include "longipred/csv.hpp"

namespace fs = std::filesystem;
using namespace longipred;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct FlagOverrides {
    std::optional<std::string> input, schema, test_input, model, imputed_manifest, out;
    std::optional<Seed> seed;
    std::optional<int> workers, m, cycles, donors, q, max_iter, n_boot, df;
    std::optional<std::string> mode, link, working;
    std::optional<double> tol, ci_level, tau, train_fraction, clamp_lo, clamp_hi;
    std::optional<bool> fine_tune, exclude_tuning_day, rubin, standardize;
    std::optional<int> n_subjects, t_min, t_max, p_signal, p_noise;
    std::optional<double> missing_rate, subject_sd, within_corr, noise_sd, trend_fraction,
        trend_slope;
    std::vector<int> m_values, q_values;
};

void add_common_flags(CLI::App* cmd, std::string& config_path, FlagOverrides& fl) {
    cmd->add_option("--config", config_path, "JSON configuration file");
    cmd->add_option("--input", fl.input, "input CSV");
    cmd->add_option("--schema", fl.schema, "schema JSON sidecar");
    cmd->add_option("--out", fl.out, "output directory");
    cmd->add_option("--seed", fl.seed, "root seed for all randomness");
    cmd->add_option("--workers", fl.workers, "parallel workers for bootstrap/LOOCV");
    cmd->add_option("--m", fl.m, "number of imputations M");
    cmd->add_option("--cycles", fl.cycles, "chained-equation sweeps per imputation");
    cmd->add_option("--donors", fl.donors, "PMM donor pool size");
    cmd->add_option("--q", fl.q, "number of selected features");
    cmd->add_option("--mode", fl.mode, "screening mode: abs_correlation|p_value");
    cmd->add_option("--link", fl.link, "link function: identity|logit");
    cmd->add_option("--working", fl.working,
                    "working correlation: independence|exchangeable|ar1");
    cmd->add_option("--tol", fl.tol, "GEE convergence tolerance");
    cmd->add_option("--max-iter", fl.max_iter, "GEE iteration cap");
    cmd->add_option("--ci-level", fl.ci_level, "pooled confidence level");
    cmd->add_option("--df", fl.df, "t degrees of freedom for pooled CIs");
    cmd->add_flag("--rubin,!--no-rubin", fl.rubin, "use the Rubin total-variance CI form");
    cmd->add_flag("--standardize,!--no-standardize", fl.standardize,
                  "standardize features with train statistics");
    cmd->add_flag("--fine-tune,!--no-fine-tune", fl.fine_tune, "apply day-one fine-tuning");
    cmd->add_flag("--exclude-tuning-day,!--include-tuning-day", fl.exclude_tuning_day,
                  "drop the tuning-day point from test metrics");
    cmd->add_option("--clamp-lo", fl.clamp_lo, "lower clamp for predictions");
    cmd->add_option("--clamp-hi", fl.clamp_hi, "upper clamp for predictions");
    cmd->add_option("--n-boot", fl.n_boot, "bootstrap replicates");
    cmd->add_option("--tau", fl.tau, "change-group threshold");
    cmd->add_option("--train-fraction", fl.train_fraction, "subject-level training share");
}

PipelineConfig resolve_config(const std::string& config_path, const FlagOverrides& fl) {
    PipelineConfig cfg;
    if (!config_path.empty()) cfg = config_from_json(read_json(config_path));
    if (fl.input) cfg.input = *fl.input;
    if (fl.schema) cfg.schema = *fl.schema;
    if (fl.test_input) cfg.test_input = *fl.test_input;
    if (fl.model) cfg.model = *fl.model;
    if (fl.imputed_manifest) cfg.imputed_manifest = *fl.imputed_manifest;
    if (fl.out) cfg.out = *fl.out;
    if (fl.seed) cfg.seed = *fl.seed;
    if (fl.workers) cfg.workers = *fl.workers;
    if (fl.m) cfg.settings.imputation.m_imputations = *fl.m;
    if (fl.cycles) cfg.settings.imputation.n_cycles = *fl.cycles;
    if (fl.donors) cfg.settings.imputation.n_donors = *fl.donors;
    if (fl.q) cfg.settings.q = *fl.q;
    if (fl.mode) {
        if (*fl.mode == "abs_correlation") {
            cfg.settings.screen_mode = ScreenMode::abs_correlation;
        } else if (*fl.mode == "p_value") {
            cfg.settings.screen_mode = ScreenMode::p_value;
        } else {
            throw ConfigError("config: --mode must be abs_correlation|p_value");
        }
    }
    if (fl.link) {
        if (*fl.link == "identity") {
            cfg.settings.gee.link = Link::identity;
        } else if (*fl.link == "logit") {
            cfg.settings.gee.link = Link::logit;
        } else {
            throw ConfigError("config: --link must be identity|logit");
        }
    }
    if (fl.working) {
        if (*fl.working == "independence") {
            cfg.settings.gee.working = WorkingKind::independence;
        } else if (*fl.working == "exchangeable") {
            cfg.settings.gee.working = WorkingKind::exchangeable;
        } else if (*fl.working == "ar1") {
            cfg.settings.gee.working = WorkingKind::ar1;
        } else {
            throw ConfigError("config: --working must be independence|exchangeable|ar1");
        }
    }
    if (fl.tol) cfg.settings.gee.tol = *fl.tol;
    if (fl.max_iter) cfg.settings.gee.max_iter = *fl.max_iter;
    if (fl.ci_level) cfg.settings.ci_level = *fl.ci_level;
    if (fl.df) cfg.settings.ci_df = *fl.df;
    if (fl.rubin) cfg.settings.rubin_variant = *fl.rubin;
    if (fl.standardize) cfg.settings.standardize = *fl.standardize;
    if (fl.fine_tune) cfg.settings.fine_tune = *fl.fine_tune;
    if (fl.exclude_tuning_day) cfg.settings.exclude_tuning_day = *fl.exclude_tuning_day;
    if (fl.clamp_lo && fl.clamp_hi) cfg.settings.clamp = {*fl.clamp_lo, *fl.clamp_hi};
    if (fl.n_boot) cfg.harness.n_boot = *fl.n_boot;
    if (fl.tau) cfg.harness.tau = *fl.tau;
    if (fl.train_fraction) cfg.harness.train_fraction = *fl.train_fraction;
    if (fl.n_subjects) cfg.generator.n_subjects = *fl.n_subjects;
    if (fl.t_min) cfg.generator.t_range.first = *fl.t_min;
    if (fl.t_max) cfg.generator.t_range.second = *fl.t_max;
    if (fl.p_signal) cfg.generator.p_signal = *fl.p_signal;
    if (fl.p_noise) cfg.generator.p_noise = *fl.p_noise;
    if (fl.missing_rate) cfg.generator.missing_rate = *fl.missing_rate;
    if (fl.subject_sd) cfg.generator.subject_intercept_sd = *fl.subject_sd;
    if (fl.within_corr) cfg.generator.within_correlation = *fl.within_corr;
    if (fl.noise_sd) cfg.generator.noise_sd = *fl.noise_sd;
    if (fl.trend_fraction) cfg.trend_fraction = *fl.trend_fraction;
    if (fl.trend_slope) cfg.trend_slope = *fl.trend_slope;
    if (!fl.m_values.empty()) cfg.sweep_m = fl.m_values;
    if (!fl.q_values.empty()) cfg.sweep_q = fl.q_values;

    // fit the generator's signal coefficient vector to a changed p_signal
    if (cfg.generator.true_feature_coefs.size() != cfg.generator.p_signal) {
        const Index p = cfg.generator.p_signal;
        Vector coefs = Vector::LinSpaced(p, 1.0, p > 1 ? 3.0 : 1.0);
        cfg.generator.true_feature_coefs = coefs;
    }

    // harness shares the root seed and worker budget
    cfg.harness.seed = cfg.seed;
    cfg.harness.workers = cfg.workers;
    // generator consumes the root seed so synth is reproducible from it
    cfg.generator.seed = cfg.seed;
    return cfg;
}

void write_manifest(const PipelineConfig& cfg, const std::string& subcommand) {
    Json manifest;
    manifest["subcommand"] = subcommand;
    manifest["config"] = config_to_json(cfg);
    write_json(cfg.out / "manifest.json", manifest);
}

LongitudinalDataset load_input(const PipelineConfig& cfg) {
    return load_csv(cfg.input, load_schema(cfg.schema));
}

void write_imputed_artifacts(const fs::path& out, const ImputedSet& set, double gamma) {
    Json manifest;
    manifest["seed"] = set.config.seed;
    manifest["m"] = set.config.m_imputations;
    manifest["cycles"] = set.config.n_cycles;
    manifest["donors"] = set.config.n_donors;
    manifest["missing_fraction"] = gamma;
    manifest["efficiency"] = efficiency(gamma, set.config.m_imputations);
    Json files = Json::array();
    for (std::size_t m = 0; m < set.datasets.size(); ++m) {
        char name[32];
        std::snprintf(name, sizeof(name), "imputed_%02zu.csv", m + 1);
        write_csv(out / name, set.datasets[m]);
        files.push_back(name);
    }
    manifest["files"] = std::move(files);
    Json cells = Json::array();
    for (const ImputedCell& c : set.imputed_cells)
        cells.push_back({{"row", c.row}, {"col", c.col}});
    manifest["imputed_cells"] = std::move(cells);
    write_json(out / "imputation.json", manifest);
}

// ---- subcommands ----

int run_synth(const PipelineConfig& cfg) {
    auto [ds, truth] = generate(cfg.generator);
    if (cfg.trend_fraction > 0.0 && cfg.trend_slope != 0.0)
        ds = inject_trend(ds, truth, cfg.trend_fraction, cfg.trend_slope);
    fs::create_directories(cfg.out);
    write_csv(cfg.out / "data.csv", ds);
    save_schema(cfg.out / "schema.json", schema_of(ds));
    write_json(cfg.out / "truth.json", to_json(truth));
    write_manifest(cfg, "synth");
    std::cout << "wrote " << (cfg.out / "data.csv").string() << " (" << ds.rows() << " rows, "
              << ds.n_subjects() << " subjects, missing fraction "
              << format_double(missing_fraction(ds)) << ")\n";
    return kExitOk;
}

int run_impute(const PipelineConfig& cfg) {
    const auto ds = load_input(cfg);
    ImputationConfig imp = cfg.settings.imputation;
    imp.seed = derive_seed(cfg.seed, "imputation-stage");
    const ImputedSet set = mice_pmm(ds, imp, cfg.workers);
    fs::create_directories(cfg.out);
    write_imputed_artifacts(cfg.out, set, missing_fraction(ds));
    write_manifest(cfg, "impute");
    std::cout << "wrote " << set.datasets.size() << " imputed datasets ("
              << set.imputed_cells.size() << " cells imputed)\n";
    return kExitOk;
}

EnsembleModel fit_from_artifacts(const PipelineConfig& cfg, const LongitudinalDataset& train,
                                 std::vector<std::string>* warnings) {
    const Json manifest = read_json(cfg.imputed_manifest);
    ImputedSet set;
    set.config.m_imputations = manifest.at("m").get<int>();
    set.config.n_cycles = manifest.at("cycles").get<int>();
    set.config.n_donors = manifest.at("donors").get<int>();
    set.config.seed = manifest.at("seed").get<Seed>();
    const ColumnSchema schema = schema_of(train);
    for (const auto& name : manifest.at("files")) {
        const fs::path file = cfg.imputed_manifest.parent_path() / name.get<std::string>();
        set.datasets.push_back(load_csv(file, schema));
    }
    std::vector<Index> covariates(static_cast<std::size_t>(train.n_covariates()));
    std::iota(covariates.begin(), covariates.end(), Index{0});
    const SelectionMask mask =
        screen_features(train, cfg.settings.q, covariates, cfg.settings.screen_mode);
    FeatureScaler scaler;
    if (cfg.settings.standardize) scaler = FeatureScaler::fit(train);
    std::vector<GeeFit> fits = fit_imputations(set, mask, scaler, cfg.settings, warnings);
    return assemble_model(std::move(fits), mask, scaler, train.feature_names(), cfg.settings,
                          warnings);
}

int run_fit(const PipelineConfig& cfg) {
    const auto train = load_input(cfg);
    std::vector<std::string> warnings;
    const EnsembleModel model = fit_from_artifacts(cfg, train, &warnings);
    fs::create_directories(cfg.out);
    save_model(cfg.out / "model.json", model);
    Json report;
    report["model"] = "model.json";
    report["warnings"] = warnings;
    write_json(cfg.out / "report.json", report);
    write_manifest(cfg, "fit");
    std::cout << "wrote " << (cfg.out / "model.json").string() << '\n';
    return kExitOk;
}

int run_predict(const PipelineConfig& cfg) {
    const auto test = load_input(cfg);
    const EnsembleModel model = load_model(cfg.model);
    const auto forecasts = predict_dataset(model, test, cfg.settings);
    fs::create_directories(cfg.out);
    write_forecast_csv(cfg.out / "predictions.csv", forecasts);
    write_manifest(cfg, "predict");
    std::cout << "wrote " << (cfg.out / "predictions.csv").string() << '\n';
    return kExitOk;
}

int run_evaluate(const PipelineConfig& cfg, bool full_pipeline_artifacts) {
    const auto ds = load_input(cfg);
    LongitudinalDataset train, test;
    if (!cfg.test_input.empty()) {
        train = ds;
        test = load_csv(cfg.test_input, load_schema(cfg.schema));
    } else {
        const SplitSpec split = split_by_subject(ds, cfg.harness.train_fraction, cfg.seed);
        train = ds.filter_subjects(split.train_subjects);
        test = ds.filter_subjects(split.test_subjects);
    }
    const TrainedModel trained = train_model(train, cfg.settings, cfg.seed);

    fs::create_directories(cfg.out);
    if (full_pipeline_artifacts) {
        write_csv(cfg.out / "train.csv", train);
        write_csv(cfg.out / "test.csv", test);
        save_schema(cfg.out / "schema.json", schema_of(train));
        write_imputed_artifacts(cfg.out, trained.imputed, missing_fraction(train));
        save_model(cfg.out / "model.json", trained.model);
        Json features;
        for (Index idx : trained.model.mask.selected_features)
            features[train.feature_names()[static_cast<std::size_t>(idx)]] = 1;
        write_json(cfg.out / "features.json", features);
    }

    const auto forecasts = predict_dataset(trained.model, test, cfg.settings);
    EvaluationReport report = evaluate_forecasts(forecasts, cfg.settings, cfg.harness.tau);
    report.warnings.insert(report.warnings.begin(), trained.warnings.begin(),
                           trained.warnings.end());
    Json j = to_json(report);
    j["n_train_subjects"] = train.n_subjects();
    j["n_test_subjects"] = test.n_subjects();
    write_json(cfg.out / "report.json", j);
    write_forecast_csv(cfg.out / "predictions.csv", forecasts);
    write_manifest(cfg, full_pipeline_artifacts ? "pipeline" : "evaluate");
    std::cout << "wrote " << (cfg.out / "report.json").string() << '\n';
    return kExitOk;
}

int run_bootstrap(const PipelineConfig& cfg) {
    const auto ds = load_input(cfg);
    const BootstrapReport report = bootstrap(ds, cfg.settings, cfg.harness);
    fs::create_directories(cfg.out);
    write_json(cfg.out / "report.json", to_json(report));
    write_bootstrap_csv(cfg.out / "bootstrap.csv", report);
    Json features;
    for (const auto& [name, count] : report.feature_counts) features[name] = count;
    write_json(cfg.out / "features.json", features);
    write_manifest(cfg, "bootstrap");
    std::cout << "wrote " << (cfg.out / "report.json").string() << " (" << report.n_failed
              << " failed replicates)\n";
    return kExitOk;
}

int run_loocv(const PipelineConfig& cfg) {
    const auto ds = load_input(cfg);
    const LoocvReport report = loocv(ds, cfg.settings, cfg.harness.tau, cfg.seed, cfg.workers);
    fs::create_directories(cfg.out);
    write_json(cfg.out / "report.json", to_json(report));
    write_forecast_csv(cfg.out / "predictions.csv", report.forecasts);
    write_manifest(cfg, "loocv");
    std::cout << "wrote " << (cfg.out / "report.json").string() << " ("
              << report.forecasts.size() << " folds)\n";
    return kExitOk;
}

int run_sweep_m(const PipelineConfig& cfg) {
    const auto ds = load_input(cfg);
    const SplitSpec split =
        split_by_subject(ds, cfg.harness.train_fraction, derive_seed(cfg.seed, "sweep-split"));
    const auto train = ds.filter_subjects(split.train_subjects);
    const auto test = ds.filter_subjects(split.test_subjects);

    std::vector<Index> covariates(static_cast<std::size_t>(train.n_covariates()));
    std::iota(covariates.begin(), covariates.end(), Index{0});
    const SelectionMask mask =
        screen_features(train, cfg.settings.q, covariates, cfg.settings.screen_mode);
    FeatureScaler scaler;
    if (cfg.settings.standardize) scaler = FeatureScaler::fit(train);

    ImputationConfig base = cfg.settings.imputation;
    base.seed = derive_seed(cfg.seed, "imputation-stage");
    const MetricVariant variant =
        cfg.settings.fine_tune ? MetricVariant::adjusted : MetricVariant::raw;
    const auto rows = imputation_sweep(
        train, base, cfg.sweep_m, [&](const ImputedSet& imp) {
            std::vector<GeeFit> fits = fit_imputations(imp, mask, scaler, cfg.settings, nullptr);
            const EnsembleModel model = assemble_model(std::move(fits), mask, scaler,
                                                       train.feature_names(), cfg.settings,
                                                       nullptr);
            const auto forecasts = predict_dataset(model, test, cfg.settings);
            const bool exclude = cfg.settings.fine_tune && cfg.settings.exclude_tuning_day;
            return metrics(forecast_pairs(forecasts, variant, exclude), variant,
                           Aggregation::longitudinal)
                .pearson_r;
        });

    fs::create_directories(cfg.out);
    Json table = Json::array();
    std::ofstream csv(cfg.out / "sweep_m.csv");
    csv << "m,accuracy\n";
    for (const SweepRow& row : rows) {
        table.push_back({{"m", row.m}, {"accuracy", row.accuracy}});
        csv << row.m << ',' << format_double(row.accuracy) << '\n';
    }
    Json report;
    report["sweep"] = "m";
    report["rows"] = std::move(table);
    write_json(cfg.out / "report.json", report);
    write_manifest(cfg, "sweep-m");
    std::cout << "wrote " << (cfg.out / "sweep_m.csv").string() << '\n';
    return kExitOk;
}

int run_sweep_q(const PipelineConfig& cfg) {
    const auto ds = load_input(cfg);
    const SplitSpec split =
        split_by_subject(ds, cfg.harness.train_fraction, derive_seed(cfg.seed, "sweep-split"));
    const auto train = ds.filter_subjects(split.train_subjects);
    const auto test = ds.filter_subjects(split.test_subjects);

    ImputationConfig imp = cfg.settings.imputation;
    imp.seed = derive_seed(cfg.seed, "imputation-stage");
    const ImputedSet imputed = mice_pmm(train, imp);
    FeatureScaler scaler;
    if (cfg.settings.standardize) scaler = FeatureScaler::fit(train);
    std::vector<Index> covariates(static_cast<std::size_t>(train.n_covariates()));
    std::iota(covariates.begin(), covariates.end(), Index{0});

    fs::create_directories(cfg.out);
    Json table = Json::array();
    std::ofstream csv(cfg.out / "sweep_q.csv");
    csv << "q,pearson_raw,pearson_adjusted,n_pairs\n";
    for (int q : cfg.sweep_q) {
        const SelectionMask mask = screen_features(train, q, covariates, cfg.settings.screen_mode);
        std::vector<GeeFit> fits = fit_imputations(imputed, mask, scaler, cfg.settings, nullptr);
        const EnsembleModel model = assemble_model(std::move(fits), mask, scaler,
                                                   train.feature_names(), cfg.settings, nullptr);
        const auto forecasts = predict_dataset(model, test, cfg.settings);
        const bool exclude = cfg.settings.fine_tune && cfg.settings.exclude_tuning_day;
        const MetricSet raw = metrics(forecast_pairs(forecasts, MetricVariant::raw, exclude),
                                      MetricVariant::raw, Aggregation::longitudinal);
        Json row;
        row["q"] = q;
        row["pearson_raw"] = raw.correlation_defined ? Json(raw.pearson_r) : Json(nullptr);
        csv << q << ',' << (raw.correlation_defined ? format_double(raw.pearson_r) : "");
        if (cfg.settings.fine_tune) {
            const MetricSet adj =
                metrics(forecast_pairs(forecasts, MetricVariant::adjusted, exclude),
                        MetricVariant::adjusted, Aggregation::longitudinal);
            row["pearson_adjusted"] = adj.correlation_defined ? Json(adj.pearson_r) : Json(nullptr);
            csv << ',' << (adj.correlation_defined ? format_double(adj.pearson_r) : "");
        } else {
            row["pearson_adjusted"] = nullptr;
            csv << ',';
        }
        row["n_pairs"] = raw.n_pairs;
        csv << ',' << raw.n_pairs << '\n';
        table.push_back(std::move(row));
    }
    Json report;
    report["sweep"] = "q";
    report["rows"] = std::move(table);
    write_json(cfg.out / "report.json", report);
    write_manifest(cfg, "sweep-q");
    std::cout << "wrote " << (cfg.out / "sweep_q.csv").string() << '\n';
    return kExitOk;
}

int classify_error_exit(const std::exception& e) {
    Json err;
    err["error"] = {{"type", "data"}, {"message", e.what()}};
    int code = kExitData;
    if (dynamic_cast<const ConfigError*>(&e) != nullptr ||
        dynamic_cast<const DomainError*>(&e) != nullptr) {
        err["error"]["type"] = "config";
        code = kExitConfig;
    }
    std::cerr << err.dump(2) << '\n';
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"personalized longitudinal outcome prediction"};
    app.require_subcommand(1);

    std::string config_path;
    FlagOverrides fl;

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset with ground truth");
    auto* impute = app.add_subcommand("impute", "multiple imputation of a training CSV");
    auto* fit = app.add_subcommand("fit", "fit and pool GEEs from imputed artifacts");
    auto* predict = app.add_subcommand("predict", "score a test CSV with a saved model");
    auto* evaluate = app.add_subcommand("evaluate", "split, train and evaluate one run");
    auto* boot = app.add_subcommand("bootstrap", "repeated split/train/test experiments");
    auto* loo = app.add_subcommand("loocv", "leave-one-subject-out cross-validation");
    auto* pipeline = app.add_subcommand("pipeline", "one-shot run writing every artifact");
    auto* sweep_m = app.add_subcommand("sweep-m", "accuracy across imputation counts");
    auto* sweep_q = app.add_subcommand("sweep-q", "accuracy across feature counts");

    for (CLI::App* cmd : {synth, impute, fit, predict, evaluate, boot, loo, pipeline, sweep_m,
                          sweep_q})
        add_common_flags(cmd, config_path, fl);

    synth->add_option("--n-subjects", fl.n_subjects, "subjects to generate");
    synth->add_option("--t-min", fl.t_min, "minimum repeated measures per subject");
    synth->add_option("--t-max", fl.t_max, "maximum repeated measures per subject");
    synth->add_option("--p-signal", fl.p_signal, "outcome-driving features");
    synth->add_option("--p-noise", fl.p_noise, "pure-noise features");
    synth->add_option("--missing-rate", fl.missing_rate, "MAR masking rate");
    synth->add_option("--subject-sd", fl.subject_sd, "subject intercept standard deviation");
    synth->add_option("--within-corr", fl.within_corr, "exchangeable noise correlation");
    synth->add_option("--noise-sd", fl.noise_sd, "noise standard deviation");
    synth->add_option("--trend-fraction", fl.trend_fraction, "subject share given a trend");
    synth->add_option("--trend-slope", fl.trend_slope, "injected outcome slope per time unit");

    predict->add_option("--model", fl.model, "model JSON produced by fit/pipeline");
    fit->add_option("--imputed-manifest", fl.imputed_manifest,
                    "imputation.json produced by impute/pipeline");
    evaluate->add_option("--test-input", fl.test_input, "explicit test CSV (skips the split)");
    sweep_m->add_option("--m-values", fl.m_values, "imputation counts to sweep");
    sweep_q->add_option("--q-values", fl.q_values, "feature counts to sweep");

    CLI11_PARSE(app, argc, argv);

    try {
        const PipelineConfig cfg = resolve_config(config_path, fl);
        const std::string name = app.get_subcommands().front()->get_name();
        validate_config(cfg, name);
        if (synth->parsed()) return run_synth(cfg);
        if (impute->parsed()) return run_impute(cfg);
        if (fit->parsed()) return run_fit(cfg);
        if (predict->parsed()) return run_predict(cfg);
        if (evaluate->parsed()) return run_evaluate(cfg, false);
        if (boot->parsed()) return run_bootstrap(cfg);
        if (loo->parsed()) return run_loocv(cfg);
        if (pipeline->parsed()) return run_evaluate(cfg, true);
        if (sweep_m->parsed()) return run_sweep_m(cfg);
        if (sweep_q->parsed()) return run_sweep_q(cfg);
        return kExitConfig;
    } catch (const std::exception& e) {
        return classify_error_exit(e);
    }
}
