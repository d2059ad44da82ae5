#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "domcx/entropy.hpp"
#include "domcx/estimation.hpp"
#include "domcx/population.hpp"

namespace domcx {

struct ReportRow {
    std::string label;            // written only when the report has a label column
    std::vector<double> values;   // one per entry of ExperimentReport::columns
};

/// One experiment's output: plot-ready rows, summary statistics and enough
/// metadata to rerun it.
struct ExperimentReport {
    std::string experiment_id;
    std::string description;
    std::string label_column;          // empty: no label column
    std::vector<std::string> columns;
    std::vector<ReportRow> rows;
    nlohmann::json metadata = nlohmann::json::object();
    std::vector<std::pair<std::string, double>> summary;

    double summary_value(const std::string& key) const;  // NaN if absent
};

/// Non-finite doubles become null.
nlohmann::json real_json(double value);

nlohmann::json to_json(const ComplexityResult& result);
nlohmann::json to_json(const EntropyResult& result);
nlohmann::json to_json(const PopulationConfig& config);
nlohmann::json to_json(const ExperimentReport& report);

/// First line: "# <experiment_id>: <description>; columns: ...", then the
/// header row, then one line per row.
std::string report_csv(const ExperimentReport& report);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace domcx
