#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "longipred/dataset.hpp"

namespace longipred {

/// Column-role map for CSV ingestion, normally supplied as a JSON sidecar:
/// {"subject": ..., "time": ..., "outcome": ..., "features": [...], "covariates": [...]}.
struct ColumnSchema {
    std::string subject = "subject";
    std::string time = "time";
    std::string outcome;
    std::vector<std::string> features;
    std::vector<std::string> covariates;
};

ColumnSchema load_schema(const std::filesystem::path& path);
void save_schema(const std::filesystem::path& path, const ColumnSchema& schema);

/// Loads a long-format CSV (one row per subject-time). Empty cells denote
/// missing values. Rows come back grouped by subject and sorted by time.
LongitudinalDataset load_csv(const std::filesystem::path& path, const ColumnSchema& schema);

/// Writes a dataset as CSV with columns subject, time, outcome, features,
/// covariates. Numbers print with shortest round-trip precision so that
/// load_csv(write_csv(ds)) reproduces every cell exactly.
void write_csv(const std::filesystem::path& path, const LongitudinalDataset& ds);

/// Schema matching write_csv's layout for the given dataset.
ColumnSchema schema_of(const LongitudinalDataset& ds);

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace longipred
