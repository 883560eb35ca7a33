#include "longipred/io.hpp"

#include <fstream>

#include "longipred/csv.hpp"

namespace longipred {

namespace {

Json json_number(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

Json vector_to_json(const Vector& v) {
    Json arr = Json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

Vector vector_from_json(const Json& j) {
    Vector v(static_cast<Index>(j.size()));
    for (Index i = 0; i < v.size(); ++i) v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
    return v;
}

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j) {
    const auto nr = static_cast<Index>(j.size());
    if (nr == 0) return Matrix(0, 0);
    const auto nc = static_cast<Index>(j.at(0).size());
    Matrix m(nr, nc);
    for (Index r = 0; r < nr; ++r)
        for (Index c = 0; c < nc; ++c)
            m(r, c) = j.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<double>();
    return m;
}

const char* link_name(Link link) { return link == Link::identity ? "identity" : "logit"; }

Link link_from_name(const std::string& name) {
    if (name == "identity") return Link::identity;
    if (name == "logit") return Link::logit;
    throw ConfigError("unknown link '" + name + "'");
}

const char* working_name(WorkingKind kind) {
    switch (kind) {
        case WorkingKind::independence: return "independence";
        case WorkingKind::exchangeable: return "exchangeable";
        case WorkingKind::ar1: return "ar1";
    }
    return "exchangeable";
}

WorkingKind working_from_name(const std::string& name) {
    if (name == "independence") return WorkingKind::independence;
    if (name == "exchangeable") return WorkingKind::exchangeable;
    if (name == "ar1") return WorkingKind::ar1;
    throw ConfigError("unknown working correlation '" + name + "'");
}

Json confusion_to_json(const std::array<std::array<int, 3>, 3>& confusion) {
    static const char* labels[3] = {"Improved", "Stable", "Worsened"};
    Json j;
    for (std::size_t i = 0; i < 3; ++i) {
        Json row;
        for (std::size_t k = 0; k < 3; ++k) row[labels[k]] = confusion[i][k];
        j[labels[i]] = std::move(row);
    }
    return j;
}

}  // namespace

Json to_json(const SelectionMask& mask, const std::vector<std::string>& feature_names) {
    Json j;
    Json selected = Json::array();
    for (Index idx : mask.selected_features)
        selected.push_back(feature_names.at(static_cast<std::size_t>(idx)));
    j["selected"] = std::move(selected);
    Json indices = Json::array();
    for (Index idx : mask.selected_features) indices.push_back(idx);
    j["selected_indices"] = std::move(indices);
    Json cov = Json::array();
    for (Index idx : mask.selected_covariates) cov.push_back(idx);
    j["covariate_indices"] = std::move(cov);
    Json scores;
    for (std::size_t k = 0; k < mask.scores.size(); ++k) {
        const FeatureScore& sc = mask.scores[k];
        Json entry;
        entry["rho"] = json_number(sc.rho);
        entry["p_value"] = json_number(sc.p_value);
        entry["n_pairs"] = sc.n_pairs;
        entry["rankable"] = sc.rankable;
        if (!sc.note.empty()) entry["note"] = sc.note;
        scores[feature_names.at(k)] = std::move(entry);
    }
    j["scores"] = std::move(scores);
    j["q"] = mask.q;
    j["mode"] = mask.mode == ScreenMode::p_value ? "p_value" : "abs_correlation";
    j["threshold_used"] = mask.threshold_used;
    return j;
}

Json to_json(const GeeFit& fit) {
    Json j;
    j["link"] = link_name(fit.link);
    j["working"] = {{"kind", working_name(fit.working.kind)}, {"alpha", fit.working.alpha}};
    Json feats;
    for (Index k = 0; k < fit.feature_coefs.size(); ++k)
        feats[fit.feature_names.at(static_cast<std::size_t>(k))] = fit.feature_coefs(k);
    Json covs;
    for (Index k = 0; k < fit.covariate_coefs.size(); ++k)
        covs[fit.covariate_names.at(static_cast<std::size_t>(k))] = fit.covariate_coefs(k);
    j["coefs"] = {{"intercept", fit.intercept},
                  {"features", std::move(feats)},
                  {"covariates", std::move(covs)}};
    j["dispersion"] = fit.dispersion;
    j["robust_cov"] = matrix_to_json(fit.robust_cov);
    j["converged"] = fit.converged;
    j["iterations"] = fit.n_iterations;
    if (!fit.warnings.empty()) j["warnings"] = fit.warnings;
    return j;
}

Json to_json(const EnsembleModel& model) {
    Json j;
    j["link"] = link_name(model.link);
    j["mask"] = to_json(model.mask, model.feature_names);
    j["pooled"] = {{"intercept", model.pooled_intercept},
                   {"feature_coefs", vector_to_json(model.pooled_feature_coefs)},
                   {"covariate_coefs", vector_to_json(model.pooled_covariate_coefs)}};
    j["feature_names"] = model.feature_names;
    j["covariate_names"] = model.covariate_names;
    if (!model.scaler.empty())
        j["scaler"] = {{"mean", vector_to_json(model.scaler.mean)},
                       {"sd", vector_to_json(model.scaler.sd)}};
    Json fits = Json::array();
    for (const GeeFit& f : model.per_imputation_fits) fits.push_back(to_json(f));
    j["per_imputation_fits"] = std::move(fits);
    Json ci = Json::array();
    for (const CiEntry& e : model.ci_table)
        ci.push_back({{"name", e.name},
                      {"estimate", e.estimate},
                      {"lower", e.lower},
                      {"upper", e.upper},
                      {"level", e.level}});
    j["ci_table"] = std::move(ci);
    return j;
}

Json to_json(const MetricSet& ms) {
    Json j;
    j["pearson_r"] = json_number(ms.pearson_r);
    j["spearman_r"] = json_number(ms.spearman_r);
    j["mse"] = json_number(ms.mse);
    j["n_pairs"] = ms.n_pairs;
    j["variant"] = ms.variant == MetricVariant::adjusted ? "adjusted" : "raw";
    j["aggregation"] =
        ms.aggregation == Aggregation::per_subject_mean ? "per-subject-mean" : "longitudinal";
    j["correlation_defined"] = ms.correlation_defined;
    return j;
}

Json to_json(const ChangeGroups& groups) {
    Json j;
    j["tau"] = groups.tau;
    j["confusion"] = confusion_to_json(groups.confusion);
    j["excluded"] = groups.excluded;
    Json assignments = Json::array();
    for (const ChangeAssignment& a : groups.assignments)
        assignments.push_back({{"subject", a.subject_id},
                               {"delta_observed", a.delta_observed},
                               {"delta_predicted", a.delta_predicted},
                               {"observed", to_string(a.observed)},
                               {"predicted", to_string(a.predicted)}});
    j["assignments"] = std::move(assignments);
    return j;
}

Json to_json(const EvaluationReport& report) {
    Json j;
    j["raw"] = {{"longitudinal", to_json(report.raw_longitudinal)},
                {"per_subject_mean", to_json(report.raw_subject_mean)}};
    if (report.adjusted_longitudinal)
        j["adjusted"] = {{"longitudinal", to_json(*report.adjusted_longitudinal)},
                         {"per_subject_mean", to_json(*report.adjusted_subject_mean)}};
    j["rmcorr_raw"] = report.rmcorr_raw ? Json(*report.rmcorr_raw) : Json(nullptr);
    j["rmcorr_adjusted"] = report.rmcorr_adjusted ? Json(*report.rmcorr_adjusted) : Json(nullptr);
    j["changes_raw"] = to_json(report.changes_raw);
    if (report.changes_adjusted) j["changes_adjusted"] = to_json(*report.changes_adjusted);
    if (!report.warnings.empty()) j["warnings"] = report.warnings;
    return j;
}

Json to_json(const BootstrapReport& report) {
    Json j;
    j["n_boot"] = report.n_boot;
    j["n_failed"] = report.n_failed;
    auto summarize = [](const std::vector<double>& v) {
        Json s;
        if (v.empty()) return s;
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        s["mean"] = mean;
        s["sd"] = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
        s["n"] = v.size();
        return s;
    };
    std::vector<double> raw_r, adj_r, rm_raw, rm_adj;
    Json reps = Json::array();
    for (const ReplicateResult& rep : report.per_replicate) {
        Json r;
        r["index"] = rep.index;
        if (rep.failed) {
            r["failed"] = true;
            r["reason"] = rep.failure_reason;
            reps.push_back(std::move(r));
            continue;
        }
        if (rep.raw_longitudinal) {
            r["raw_longitudinal"] = to_json(*rep.raw_longitudinal);
            if (rep.raw_longitudinal->correlation_defined)
                raw_r.push_back(rep.raw_longitudinal->pearson_r);
        }
        if (rep.adjusted_longitudinal) {
            r["adjusted_longitudinal"] = to_json(*rep.adjusted_longitudinal);
            if (rep.adjusted_longitudinal->correlation_defined)
                adj_r.push_back(rep.adjusted_longitudinal->pearson_r);
        }
        if (rep.raw_subject_mean) r["raw_subject_mean"] = to_json(*rep.raw_subject_mean);
        if (rep.adjusted_subject_mean)
            r["adjusted_subject_mean"] = to_json(*rep.adjusted_subject_mean);
        r["rmcorr_raw"] = rep.rmcorr_raw ? Json(*rep.rmcorr_raw) : Json(nullptr);
        r["rmcorr_adjusted"] = rep.rmcorr_adjusted ? Json(*rep.rmcorr_adjusted) : Json(nullptr);
        if (rep.rmcorr_raw) rm_raw.push_back(*rep.rmcorr_raw);
        if (rep.rmcorr_adjusted) rm_adj.push_back(*rep.rmcorr_adjusted);
        r["selected_features"] = rep.selected_features;
        reps.push_back(std::move(r));
    }
    j["summary"] = {{"pearson_raw", summarize(raw_r)},
                    {"pearson_adjusted", summarize(adj_r)},
                    {"rmcorr_raw", summarize(rm_raw)},
                    {"rmcorr_adjusted", summarize(rm_adj)}};
    j["per_replicate"] = std::move(reps);
    j["null_pearson"] = report.null_pearson;
    j["null_spearman"] = report.null_spearman;
    j["feature_counts"] = report.feature_counts;
    j["confusion_raw"] = confusion_to_json(report.confusion_raw);
    j["confusion_adjusted"] = confusion_to_json(report.confusion_adjusted);
    return j;
}

Json to_json(const LoocvReport& report) {
    Json j;
    j["n_folds_completed"] = report.forecasts.size();
    Json failed = Json::array();
    for (const auto& [subject, reason] : report.failed_folds)
        failed.push_back({{"subject", subject}, {"reason", reason}});
    j["failed_folds"] = std::move(failed);
    j["changes_raw"] = to_json(report.changes_raw);
    if (report.changes_adjusted) j["changes_adjusted"] = to_json(*report.changes_adjusted);
    if (report.raw_longitudinal) j["raw_longitudinal"] = to_json(*report.raw_longitudinal);
    if (report.adjusted_longitudinal)
        j["adjusted_longitudinal"] = to_json(*report.adjusted_longitudinal);
    return j;
}

Json to_json(const GroundTruth& truth) {
    Json j;
    j["intercept"] = truth.config.true_intercept;
    j["feature_coefs"] = vector_to_json(truth.config.true_feature_coefs);
    j["covariate_coefs"] = vector_to_json(truth.config.true_covariate_coefs);
    j["subject_intercept_sd"] = truth.config.subject_intercept_sd;
    j["within_correlation"] = truth.config.within_correlation;
    j["noise_sd"] = truth.config.noise_sd;
    j["missing_rate"] = truth.config.missing_rate;
    j["marginal_alpha"] = truth.marginal_alpha;
    j["subject_intercepts"] = vector_to_json(truth.subject_intercepts);
    j["trend_subjects"] = truth.trend_subjects;
    j["trend_slope"] = truth.trend_slope;
    j["seed"] = truth.config.seed;
    return j;
}

void save_model(const std::filesystem::path& path, const EnsembleModel& model) {
    write_json(path, to_json(model));
}

EnsembleModel load_model(const std::filesystem::path& path) {
    const Json j = read_json(path);
    EnsembleModel model;
    try {
        model.link = link_from_name(j.at("link").get<std::string>());
        model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        model.covariate_names = j.at("covariate_names").get<std::vector<std::string>>();
        const Json& mask = j.at("mask");
        for (const auto& idx : mask.at("selected_indices"))
            model.mask.selected_features.push_back(idx.get<Index>());
        for (const auto& idx : mask.at("covariate_indices"))
            model.mask.selected_covariates.push_back(idx.get<Index>());
        model.mask.q = mask.at("q").get<int>();
        model.mask.threshold_used = mask.at("threshold_used").get<double>();
        model.mask.mode = mask.at("mode").get<std::string>() == "p_value"
                              ? ScreenMode::p_value
                              : ScreenMode::abs_correlation;
        const Json& pooled = j.at("pooled");
        model.pooled_intercept = pooled.at("intercept").get<double>();
        model.pooled_feature_coefs = vector_from_json(pooled.at("feature_coefs"));
        model.pooled_covariate_coefs = vector_from_json(pooled.at("covariate_coefs"));
        if (j.contains("scaler")) {
            model.scaler.mean = vector_from_json(j.at("scaler").at("mean"));
            model.scaler.sd = vector_from_json(j.at("scaler").at("sd"));
        }
        for (const Json& jf : j.at("per_imputation_fits")) {
            GeeFit fit;
            fit.link = link_from_name(jf.at("link").get<std::string>());
            fit.working.kind = working_from_name(jf.at("working").at("kind").get<std::string>());
            fit.working.alpha = jf.at("working").at("alpha").get<double>();
            const Json& coefs = jf.at("coefs");
            fit.intercept = coefs.at("intercept").get<double>();
            fit.feature_coefs = Vector(static_cast<Index>(coefs.at("features").size()));
            Index k = 0;
            for (const auto& [name, value] : coefs.at("features").items()) {
                fit.feature_names.push_back(name);
                fit.feature_coefs(k++) = value.get<double>();
            }
            fit.covariate_coefs = Vector(static_cast<Index>(coefs.at("covariates").size()));
            k = 0;
            for (const auto& [name, value] : coefs.at("covariates").items()) {
                fit.covariate_names.push_back(name);
                fit.covariate_coefs(k++) = value.get<double>();
            }
            fit.dispersion = jf.at("dispersion").get<double>();
            fit.robust_cov = matrix_from_json(jf.at("robust_cov"));
            fit.converged = jf.at("converged").get<bool>();
            fit.n_iterations = jf.at("iterations").get<int>();
            model.per_imputation_fits.push_back(std::move(fit));
        }
        for (const Json& je : j.at("ci_table"))
            model.ci_table.push_back({je.at("name").get<std::string>(),
                                      je.at("estimate").get<double>(), je.at("lower").get<double>(),
                                      je.at("upper").get<double>(), je.at("level").get<double>()});
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("model: malformed file " + path.string() + ": " + e.what());
    }
    return model;
}

void write_json(const std::filesystem::path& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

Json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    try {
        Json j;
        in >> j;
        return j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid JSON in " + path.string() + ": " + e.what());
    }
}

void write_forecast_csv(const std::filesystem::path& path,
                        const std::vector<SubjectForecast>& forecasts) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    out << "subject,time,y_obs,y_hat_raw,y_hat_adj,skipped,reason\n";
    for (const SubjectForecast& fc : forecasts) {
        for (const ForecastEntry& e : fc.entries) {
            out << fc.subject_id << ',' << e.time_index << ',';
            if (e.y_observed) out << format_double(*e.y_observed);
            out << ',';
            if (!e.skipped) out << format_double(e.y_hat_raw);
            out << ',';
            if (e.y_hat_adjusted) out << format_double(*e.y_hat_adjusted);
            out << ',' << (e.skipped ? 1 : 0) << ',' << e.skip_reason << '\n';
        }
    }
}

void write_bootstrap_csv(const std::filesystem::path& path, const BootstrapReport& report) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    out << "replicate,failed,pearson_raw,spearman_raw,mse_raw,pearson_adj,spearman_adj,mse_adj,"
           "rmcorr_raw,rmcorr_adj\n";
    auto cell = [&](const std::optional<double>& v) {
        out << ',';
        if (v && !std::isnan(*v)) out << format_double(*v);
    };
    for (const ReplicateResult& rep : report.per_replicate) {
        out << rep.index << ',' << (rep.failed ? 1 : 0);
        const auto& raw = rep.raw_longitudinal;
        const auto& adj = rep.adjusted_longitudinal;
        cell(raw ? std::optional<double>(raw->pearson_r) : std::nullopt);
        cell(raw ? std::optional<double>(raw->spearman_r) : std::nullopt);
        cell(raw ? std::optional<double>(raw->mse) : std::nullopt);
        cell(adj ? std::optional<double>(adj->pearson_r) : std::nullopt);
        cell(adj ? std::optional<double>(adj->spearman_r) : std::nullopt);
        cell(adj ? std::optional<double>(adj->mse) : std::nullopt);
        cell(rep.rmcorr_raw);
        cell(rep.rmcorr_adjusted);
        out << '\n';
    }
}

}  // namespace longipred
