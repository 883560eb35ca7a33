#pragma once

#include <filesystem>
#include <json.hpp>

#include "longipred/harness.hpp"
#include "longipred/synthetic.hpp"

namespace longipred {

using Json = nlohmann::ordered_json;

Json to_json(const SelectionMask& mask, const std::vector<std::string>& feature_names);
Json to_json(const GeeFit& fit);
Json to_json(const EnsembleModel& model);
Json to_json(const MetricSet& ms);
Json to_json(const ChangeGroups& groups);
Json to_json(const EvaluationReport& report);
Json to_json(const BootstrapReport& report);
Json to_json(const LoocvReport& report);
Json to_json(const GroundTruth& truth);

/// Model artifact round-trip: enough to reproduce predictions exactly.
void save_model(const std::filesystem::path& path, const EnsembleModel& model);
EnsembleModel load_model(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

/// Forecast rows as CSV: subject,time,y_obs,y_hat_raw,y_hat_adj,skipped,reason.
void write_forecast_csv(const std::filesystem::path& path,
                        const std::vector<SubjectForecast>& forecasts);

/// Flat per-replicate correlation table for external plotting.
void write_bootstrap_csv(const std::filesystem::path& path, const BootstrapReport& report);

}  // namespace longipred
