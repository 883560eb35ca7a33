#pragma once

#include <filesystem>

#include "longipred/harness.hpp"
#include "longipred/io.hpp"
#include "longipred/synthetic.hpp"

namespace longipred {

/// Full resolved configuration for a CLI run. Loaded from a JSON file, then
/// overridden field-by-field from command-line flags; the resolved form is
/// embedded in every manifest so runs can be reproduced exactly.
struct PipelineConfig {
    std::filesystem::path input;
    std::filesystem::path schema;
    std::filesystem::path test_input;  // optional explicit test set
    std::filesystem::path model;       // for `predict`
    std::filesystem::path imputed_manifest;  // for `fit`
    std::filesystem::path out = "out";

    ModelSettings settings;
    HarnessConfig harness;
    GeneratorConfig generator = GeneratorConfig::defaults();
    double trend_fraction = 0.0;
    double trend_slope = 0.0;

    std::vector<int> sweep_m{1, 5, 15, 25};
    std::vector<int> sweep_q{2, 4, 6};

    Seed seed = 0;
    int workers = 1;
};

/// Parses a config JSON; unknown keys are rejected so typos cannot silently
/// fall back to defaults.
PipelineConfig config_from_json(const Json& j);

/// Resolved config back to JSON (manifest form).
Json config_to_json(const PipelineConfig& cfg);

/// Field-level validation for the given subcommand; throws ConfigError whose
/// message lists every offending field.
void validate_config(const PipelineConfig& cfg, const std::string& subcommand);

}  // namespace longipred
