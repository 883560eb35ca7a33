#include "longipred/config.hpp"

#include <algorithm>
#include <set>

namespace longipred {

namespace {

void require_known_keys(const Json& j, const std::set<std::string>& known,
                        const std::string& scope) {
    for (const auto& [key, value] : j.items()) {
        if (!known.count(key))
            throw ConfigError("config: unknown key '" + scope + key + "'");
    }
}

Link link_from(const std::string& name) {
    if (name == "identity") return Link::identity;
    if (name == "logit") return Link::logit;
    throw ConfigError("config: gee.link must be 'identity' or 'logit', got '" + name + "'");
}

WorkingKind working_from(const std::string& name) {
    if (name == "independence") return WorkingKind::independence;
    if (name == "exchangeable") return WorkingKind::exchangeable;
    if (name == "ar1") return WorkingKind::ar1;
    throw ConfigError("config: gee.working must be independence|exchangeable|ar1, got '" + name +
                      "'");
}

}  // namespace

PipelineConfig config_from_json(const Json& j) {
    PipelineConfig cfg;
    require_known_keys(j, {"input", "schema", "test_input", "model", "imputed_manifest", "out",
                           "seed", "workers", "imputation", "selection", "gee", "ensemble",
                           "prediction", "evaluation", "generator", "sweep"},
                       "");
    if (j.contains("input")) cfg.input = j.at("input").get<std::string>();
    if (j.contains("schema")) cfg.schema = j.at("schema").get<std::string>();
    if (j.contains("test_input")) cfg.test_input = j.at("test_input").get<std::string>();
    if (j.contains("model")) cfg.model = j.at("model").get<std::string>();
    if (j.contains("imputed_manifest"))
        cfg.imputed_manifest = j.at("imputed_manifest").get<std::string>();
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<Seed>();
    if (j.contains("workers")) cfg.workers = j.at("workers").get<int>();

    if (j.contains("imputation")) {
        const Json& ji = j.at("imputation");
        require_known_keys(ji, {"m", "cycles", "donors"}, "imputation.");
        if (ji.contains("m")) cfg.settings.imputation.m_imputations = ji.at("m").get<int>();
        if (ji.contains("cycles")) cfg.settings.imputation.n_cycles = ji.at("cycles").get<int>();
        if (ji.contains("donors")) cfg.settings.imputation.n_donors = ji.at("donors").get<int>();
    }
    if (j.contains("selection")) {
        const Json& js = j.at("selection");
        require_known_keys(js, {"q", "mode", "standardize"}, "selection.");
        if (js.contains("q")) cfg.settings.q = js.at("q").get<int>();
        if (js.contains("mode")) {
            const auto mode = js.at("mode").get<std::string>();
            if (mode == "abs_correlation") {
                cfg.settings.screen_mode = ScreenMode::abs_correlation;
            } else if (mode == "p_value") {
                cfg.settings.screen_mode = ScreenMode::p_value;
            } else {
                throw ConfigError("config: selection.mode must be abs_correlation|p_value");
            }
        }
        if (js.contains("standardize")) cfg.settings.standardize = js.at("standardize").get<bool>();
    }
    if (j.contains("gee")) {
        const Json& jg = j.at("gee");
        require_known_keys(jg, {"link", "working", "tol", "max_iter"}, "gee.");
        if (jg.contains("link")) cfg.settings.gee.link = link_from(jg.at("link").get<std::string>());
        if (jg.contains("working"))
            cfg.settings.gee.working = working_from(jg.at("working").get<std::string>());
        if (jg.contains("tol")) cfg.settings.gee.tol = jg.at("tol").get<double>();
        if (jg.contains("max_iter")) cfg.settings.gee.max_iter = jg.at("max_iter").get<int>();
    }
    if (j.contains("ensemble")) {
        const Json& je = j.at("ensemble");
        require_known_keys(je, {"ci_level", "df", "rubin_variant"}, "ensemble.");
        if (je.contains("ci_level")) cfg.settings.ci_level = je.at("ci_level").get<double>();
        if (je.contains("df") && !je.at("df").is_null())
            cfg.settings.ci_df = je.at("df").get<int>();
        if (je.contains("rubin_variant"))
            cfg.settings.rubin_variant = je.at("rubin_variant").get<bool>();
    }
    if (j.contains("prediction")) {
        const Json& jp = j.at("prediction");
        require_known_keys(jp, {"fine_tune", "exclude_tuning_day", "clamp"}, "prediction.");
        if (jp.contains("fine_tune")) cfg.settings.fine_tune = jp.at("fine_tune").get<bool>();
        if (jp.contains("exclude_tuning_day"))
            cfg.settings.exclude_tuning_day = jp.at("exclude_tuning_day").get<bool>();
        if (jp.contains("clamp") && !jp.at("clamp").is_null()) {
            if (!jp.at("clamp").is_array() || jp.at("clamp").size() != 2)
                throw ConfigError("config: prediction.clamp must be null or [lo, hi]");
            cfg.settings.clamp = {jp.at("clamp").at(0).get<double>(),
                                  jp.at("clamp").at(1).get<double>()};
        }
    }
    if (j.contains("evaluation")) {
        const Json& je = j.at("evaluation");
        require_known_keys(je, {"n_boot", "tau", "train_fraction", "max_failure_fraction"},
                           "evaluation.");
        if (je.contains("n_boot")) cfg.harness.n_boot = je.at("n_boot").get<int>();
        if (je.contains("tau")) cfg.harness.tau = je.at("tau").get<double>();
        if (je.contains("train_fraction"))
            cfg.harness.train_fraction = je.at("train_fraction").get<double>();
        if (je.contains("max_failure_fraction"))
            cfg.harness.max_failure_fraction = je.at("max_failure_fraction").get<double>();
    }
    if (j.contains("generator")) {
        const Json& jg = j.at("generator");
        require_known_keys(jg,
                           {"n_subjects", "t_min", "t_max", "p_signal", "p_noise", "intercept",
                            "feature_coefs", "covariate_coefs", "subject_intercept_sd",
                            "within_correlation", "noise_sd", "missing_rate", "trend_fraction",
                            "trend_slope"},
                           "generator.");
        GeneratorConfig& g = cfg.generator;
        if (jg.contains("n_subjects")) g.n_subjects = jg.at("n_subjects").get<int>();
        if (jg.contains("t_min")) g.t_range.first = jg.at("t_min").get<int>();
        if (jg.contains("t_max")) g.t_range.second = jg.at("t_max").get<int>();
        if (jg.contains("p_signal")) g.p_signal = jg.at("p_signal").get<int>();
        if (jg.contains("p_noise")) g.p_noise = jg.at("p_noise").get<int>();
        if (jg.contains("intercept")) g.true_intercept = jg.at("intercept").get<double>();
        if (jg.contains("feature_coefs")) {
            const Json& arr = jg.at("feature_coefs");
            g.true_feature_coefs = Vector(static_cast<Index>(arr.size()));
            for (Index i = 0; i < g.true_feature_coefs.size(); ++i)
                g.true_feature_coefs(i) = arr.at(static_cast<std::size_t>(i)).get<double>();
            g.p_signal = static_cast<int>(g.true_feature_coefs.size());
        }
        if (jg.contains("covariate_coefs")) {
            const Json& arr = jg.at("covariate_coefs");
            g.true_covariate_coefs = Vector(static_cast<Index>(arr.size()));
            for (Index i = 0; i < g.true_covariate_coefs.size(); ++i)
                g.true_covariate_coefs(i) = arr.at(static_cast<std::size_t>(i)).get<double>();
        }
        if (jg.contains("subject_intercept_sd"))
            g.subject_intercept_sd = jg.at("subject_intercept_sd").get<double>();
        if (jg.contains("within_correlation"))
            g.within_correlation = jg.at("within_correlation").get<double>();
        if (jg.contains("noise_sd")) g.noise_sd = jg.at("noise_sd").get<double>();
        if (jg.contains("missing_rate")) g.missing_rate = jg.at("missing_rate").get<double>();
        if (jg.contains("trend_fraction")) cfg.trend_fraction = jg.at("trend_fraction").get<double>();
        if (jg.contains("trend_slope")) cfg.trend_slope = jg.at("trend_slope").get<double>();
    }
    if (j.contains("sweep")) {
        const Json& js = j.at("sweep");
        require_known_keys(js, {"m_values", "q_values"}, "sweep.");
        if (js.contains("m_values")) cfg.sweep_m = js.at("m_values").get<std::vector<int>>();
        if (js.contains("q_values")) cfg.sweep_q = js.at("q_values").get<std::vector<int>>();
    }
    return cfg;
}

Json config_to_json(const PipelineConfig& cfg) {
    Json j;
    j["input"] = cfg.input.string();
    j["schema"] = cfg.schema.string();
    if (!cfg.test_input.empty()) j["test_input"] = cfg.test_input.string();
    if (!cfg.model.empty()) j["model"] = cfg.model.string();
    if (!cfg.imputed_manifest.empty()) j["imputed_manifest"] = cfg.imputed_manifest.string();
    j["out"] = cfg.out.string();
    j["seed"] = cfg.seed;
    j["workers"] = cfg.workers;
    j["imputation"] = {{"m", cfg.settings.imputation.m_imputations},
                       {"cycles", cfg.settings.imputation.n_cycles},
                       {"donors", cfg.settings.imputation.n_donors}};
    j["selection"] = {
        {"q", cfg.settings.q},
        {"mode",
         cfg.settings.screen_mode == ScreenMode::p_value ? "p_value" : "abs_correlation"},
        {"standardize", cfg.settings.standardize}};
    j["gee"] = {{"link", cfg.settings.gee.link == Link::logit ? "logit" : "identity"},
                {"working", cfg.settings.gee.working == WorkingKind::independence
                                ? "independence"
                                : (cfg.settings.gee.working == WorkingKind::ar1 ? "ar1"
                                                                                : "exchangeable")},
                {"tol", cfg.settings.gee.tol},
                {"max_iter", cfg.settings.gee.max_iter}};
    j["ensemble"] = {{"ci_level", cfg.settings.ci_level},
                     {"df", cfg.settings.ci_df ? Json(*cfg.settings.ci_df) : Json(nullptr)},
                     {"rubin_variant", cfg.settings.rubin_variant}};
    j["prediction"] = {
        {"fine_tune", cfg.settings.fine_tune},
        {"exclude_tuning_day", cfg.settings.exclude_tuning_day},
        {"clamp", cfg.settings.clamp
                      ? Json::array({cfg.settings.clamp->first, cfg.settings.clamp->second})
                      : Json(nullptr)}};
    j["evaluation"] = {{"n_boot", cfg.harness.n_boot},
                       {"tau", cfg.harness.tau},
                       {"train_fraction", cfg.harness.train_fraction},
                       {"max_failure_fraction", cfg.harness.max_failure_fraction}};
    Json feature_coefs = Json::array();
    for (Index i = 0; i < cfg.generator.true_feature_coefs.size(); ++i)
        feature_coefs.push_back(cfg.generator.true_feature_coefs(i));
    Json covariate_coefs = Json::array();
    for (Index i = 0; i < cfg.generator.true_covariate_coefs.size(); ++i)
        covariate_coefs.push_back(cfg.generator.true_covariate_coefs(i));
    j["generator"] = {{"n_subjects", cfg.generator.n_subjects},
                      {"t_min", cfg.generator.t_range.first},
                      {"t_max", cfg.generator.t_range.second},
                      {"p_signal", cfg.generator.p_signal},
                      {"p_noise", cfg.generator.p_noise},
                      {"intercept", cfg.generator.true_intercept},
                      {"feature_coefs", std::move(feature_coefs)},
                      {"covariate_coefs", std::move(covariate_coefs)},
                      {"subject_intercept_sd", cfg.generator.subject_intercept_sd},
                      {"within_correlation", cfg.generator.within_correlation},
                      {"noise_sd", cfg.generator.noise_sd},
                      {"missing_rate", cfg.generator.missing_rate},
                      {"trend_fraction", cfg.trend_fraction},
                      {"trend_slope", cfg.trend_slope}};
    j["sweep"] = {{"m_values", cfg.sweep_m}, {"q_values", cfg.sweep_q}};
    return j;
}

void validate_config(const PipelineConfig& cfg, const std::string& subcommand) {
    std::vector<std::string> problems;
    auto need_input = [&]() {
        if (cfg.input.empty()) problems.push_back("input: required for " + subcommand);
        if (cfg.schema.empty()) problems.push_back("schema: required for " + subcommand);
    };
    if (subcommand != "synth") {
        if (subcommand == "predict") {
            if (cfg.model.empty()) problems.push_back("model: required for predict");
            need_input();
        } else if (subcommand == "fit") {
            if (cfg.imputed_manifest.empty())
                problems.push_back("imputed_manifest: required for fit");
            need_input();
        } else {
            need_input();
        }
    }
    if (cfg.out.empty()) problems.push_back("out: output directory must be set");
    std::vector<std::filesystem::path> paths{cfg.input, cfg.schema, cfg.test_input, cfg.model,
                                             cfg.imputed_manifest};
    paths.erase(std::remove_if(paths.begin(), paths.end(),
                               [](const std::filesystem::path& p) { return p.empty(); }),
                paths.end());
    std::sort(paths.begin(), paths.end());
    if (std::adjacent_find(paths.begin(), paths.end()) != paths.end())
        problems.push_back("paths: input, schema, test_input, model and imputed_manifest must be distinct");
    if (cfg.settings.imputation.m_imputations < 1) problems.push_back("imputation.m: must be >= 1");
    if (cfg.settings.imputation.n_cycles < 1) problems.push_back("imputation.cycles: must be >= 1");
    if (cfg.settings.imputation.n_donors < 1) problems.push_back("imputation.donors: must be >= 1");
    if (cfg.settings.q < 1) problems.push_back("selection.q: must be >= 1");
    if (!(cfg.settings.gee.tol > 0.0)) problems.push_back("gee.tol: must be positive");
    if (cfg.settings.gee.max_iter < 1) problems.push_back("gee.max_iter: must be >= 1");
    if (!(cfg.settings.ci_level > 0.0 && cfg.settings.ci_level < 1.0))
        problems.push_back("ensemble.ci_level: must lie in (0, 1)");
    if (cfg.settings.ci_df && *cfg.settings.ci_df < 1)
        problems.push_back("ensemble.df: must be >= 1 when set");
    if (cfg.settings.clamp && !(cfg.settings.clamp->first < cfg.settings.clamp->second))
        problems.push_back("prediction.clamp: lo must be < hi");
    if (cfg.harness.n_boot < 1) problems.push_back("evaluation.n_boot: must be >= 1");
    if (!(cfg.harness.tau > 0.0)) problems.push_back("evaluation.tau: must be positive");
    if (!(cfg.harness.train_fraction > 0.0 && cfg.harness.train_fraction < 1.0))
        problems.push_back("evaluation.train_fraction: must lie in (0, 1)");
    if (cfg.workers < 1) problems.push_back("workers: must be >= 1");
    if (subcommand == "synth") {
        try {
            cfg.generator.validate();
        } catch (const ConfigError& e) {
            problems.push_back(std::string("generator: ") + e.what());
        }
        if (!(cfg.trend_fraction >= 0.0 && cfg.trend_fraction <= 1.0))
            problems.push_back("generator.trend_fraction: must lie in [0, 1]");
    }
    if (subcommand == "sweep-m") {
        if (cfg.sweep_m.empty()) problems.push_back("sweep.m_values: must be non-empty");
        for (int m : cfg.sweep_m)
            if (m < 1) problems.push_back("sweep.m_values: every entry must be >= 1");
    }
    if (subcommand == "sweep-q") {
        if (cfg.sweep_q.empty()) problems.push_back("sweep.q_values: must be non-empty");
        for (int q : cfg.sweep_q)
            if (q < 1) problems.push_back("sweep.q_values: every entry must be >= 1");
    }
    if (!problems.empty()) {
        std::string joined = "config validation failed:";
        for (const auto& p : problems) joined += "\n  - " + p;
        throw ConfigError(joined);
    }
}

}  // namespace longipred
