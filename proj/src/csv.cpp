#include "longipred/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace longipred {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_number(const std::string& cell, std::size_t line_no, const std::string& column) {
    const std::string t = trim(cell);
    double value = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value))
        throw ParseError("line " + std::to_string(line_no) + ": non-numeric value '" + t +
                         "' in column '" + column + "'");
    return value;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

ColumnSchema load_schema(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("schema: cannot open " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("schema: invalid JSON in " + path.string() + ": " + e.what());
    }
    ColumnSchema s;
    try {
        s.subject = j.at("subject").get<std::string>();
        s.time = j.at("time").get<std::string>();
        s.outcome = j.at("outcome").get<std::string>();
        s.features = j.at("features").get<std::vector<std::string>>();
        s.covariates = j.value("covariates", std::vector<std::string>{});
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("schema: missing or mistyped field in " + path.string() + ": " + e.what());
    }
    return s;
}

void save_schema(const std::filesystem::path& path, const ColumnSchema& schema) {
    nlohmann::json j;
    j["subject"] = schema.subject;
    j["time"] = schema.time;
    j["outcome"] = schema.outcome;
    j["features"] = schema.features;
    j["covariates"] = schema.covariates;
    std::ofstream out(path);
    if (!out) throw ParseError("schema: cannot write " + path.string());
    out << j.dump(2) << '\n';
}

LongitudinalDataset load_csv(const std::filesystem::path& path, const ColumnSchema& schema) {
    std::ifstream in(path);
    if (!in) throw ParseError("csv: cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw ParseError("csv: empty file " + path.string());
    const std::vector<std::string> header = split_line(line);

    auto column_of = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (trim(header[i]) == name) return i;
        throw ParseError("csv: column '" + name + "' not found in header of " + path.string());
    };

    const std::size_t subj_col = column_of(schema.subject);
    const std::size_t time_col = column_of(schema.time);
    const std::size_t outcome_col = column_of(schema.outcome);
    std::vector<std::size_t> feature_cols;
    std::vector<std::size_t> covariate_cols;
    for (const auto& f : schema.features) feature_cols.push_back(column_of(f));
    for (const auto& c : schema.covariates) covariate_cols.push_back(column_of(c));

    std::vector<Observation> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size())
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " cells, found " +
                             std::to_string(cells.size()));
        Observation o;
        o.subject_id = trim(cells[subj_col]);
        if (o.subject_id.empty())
            throw ParseError("line " + std::to_string(line_no) + ": empty subject id");
        const double t = parse_number(cells[time_col], line_no, schema.time);
        if (t < 1.0 || t != std::floor(t))
            throw ParseError("line " + std::to_string(line_no) +
                             ": time index must be a positive integer, got '" +
                             trim(cells[time_col]) + "'");
        o.time_index = static_cast<int>(t);
        auto read_cell = [&](std::size_t col, const std::string& name) -> std::optional<double> {
            if (trim(cells[col]).empty()) return std::nullopt;
            return parse_number(cells[col], line_no, name);
        };
        for (std::size_t k = 0; k < feature_cols.size(); ++k)
            o.features.push_back(read_cell(feature_cols[k], schema.features[k]));
        for (std::size_t k = 0; k < covariate_cols.size(); ++k)
            o.covariates.push_back(read_cell(covariate_cols[k], schema.covariates[k]));
        o.outcome = read_cell(outcome_col, schema.outcome);
        rows.push_back(std::move(o));
    }
    return LongitudinalDataset::from_observations(rows, schema.features, schema.covariates,
                                                  schema.outcome);
}

void write_csv(const std::filesystem::path& path, const LongitudinalDataset& ds) {
    std::ofstream out(path);
    if (!out) throw ParseError("csv: cannot write " + path.string());
    out << "subject,time," << ds.outcome_name();
    for (const auto& f : ds.feature_names()) out << ',' << f;
    for (const auto& c : ds.covariate_names()) out << ',' << c;
    out << '\n';
    const Index p = ds.n_features();
    const Index c = ds.n_covariates();
    for (const SubjectSpan& s : ds.subjects()) {
        for (Index r = s.begin; r < s.begin + s.count; ++r) {
            out << s.id << ',' << ds.times()[static_cast<std::size_t>(r)];
            auto emit = [&](Index col) {
                out << ',';
                if (ds.observed()(r, col)) out << format_double(ds.cells()(r, col));
            };
            emit(ds.outcome_col());
            for (Index j = 0; j < p; ++j) emit(j);
            for (Index j = 0; j < c; ++j) emit(p + j);
            out << '\n';
        }
    }
}

ColumnSchema schema_of(const LongitudinalDataset& ds) {
    ColumnSchema s;
    s.outcome = ds.outcome_name();
    s.features = ds.feature_names();
    s.covariates = ds.covariate_names();
    return s;
}

}  // namespace longipred
