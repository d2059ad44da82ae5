#include "domcx/report.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "domcx/csv.hpp"
#include "domcx/error.hpp"

namespace domcx {

double ExperimentReport::summary_value(const std::string& key) const {
    for (const auto& [k, v] : summary) {
        if (k == key) return v;
    }
    return std::numeric_limits<double>::quiet_NaN();
}

nlohmann::json real_json(double value) {
    if (!std::isfinite(value)) return nullptr;
    return value;
}

nlohmann::json to_json(const ComplexityResult& r) {
    return nlohmann::json{
        {"domain", r.domain_name},
        {"raw_auc", real_json(r.raw_auc)},
        {"normalized", r.normalized ? real_json(*r.normalized) : nlohmann::json(nullptr)},
        {"ci_halfwidth", real_json(r.ci_halfwidth)},
        {"v_min", real_json(r.v_min)},
        {"v_max", real_json(r.v_max)},
        {"slope", real_json(r.fit.slope)},
        {"intercept", real_json(r.fit.intercept)},
        {"mse", real_json(r.fit.mse)},
        {"n", r.fit.n},
    };
}

nlohmann::json to_json(const EntropyResult& r) {
    return nlohmann::json{
        {"domain", r.domain_name},
        {"mean_local_entropy", real_json(r.mean_local_entropy)},
        {"label_term", real_json(r.label_term)},
        {"total_per_image", real_json(r.total_per_image)},
        {"normalized", r.normalized ? real_json(*r.normalized) : nlohmann::json(nullptr)},
    };
}

nlohmann::json to_json(const PopulationConfig& c) {
    return nlohmann::json{
        {"size", c.population_size},
        {"hidden_layers", {c.hidden_layers.min, c.hidden_layers.max}},
        {"nodes_per_layer", {c.nodes_per_layer.min, c.nodes_per_layer.max}},
        {"protocol",
         {{"epochs", c.protocol.epochs},
          {"learning_rate", c.protocol.learning_rate},
          {"batch_size", c.protocol.batch_size},
          {"shuffle_seed", c.protocol.shuffle_seed}}},
        {"master_seed", c.master_seed},
    };
}

nlohmann::json to_json(const ExperimentReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : report.rows) {
        nlohmann::json obj = nlohmann::json::object();
        if (!report.label_column.empty()) obj[report.label_column] = row.label;
        for (std::size_t i = 0; i < report.columns.size(); ++i) obj[report.columns[i]] = real_json(row.values.at(i));
        rows.push_back(std::move(obj));
    }
    nlohmann::json summary = nlohmann::json::object();
    for (const auto& [k, v] : report.summary) summary[k] = real_json(v);
    return nlohmann::json{
        {"experiment_id", report.experiment_id},
        {"description", report.description},
        {"columns", report.columns},
        {"rows", std::move(rows)},
        {"summary", std::move(summary)},
        {"metadata", report.metadata},
    };
}

std::string report_csv(const ExperimentReport& report) {
    std::ostringstream out;
    std::ostringstream header;
    bool first = true;
    if (!report.label_column.empty()) {
        header << report.label_column;
        first = false;
    }
    for (const auto& c : report.columns) {
        if (!first) header << ',';
        header << c;
        first = false;
    }
    out << "# " << report.experiment_id << ": " << report.description << "; columns: " << header.str() << '\n';
    out << header.str() << '\n';
    for (const auto& row : report.rows) {
        if (row.values.size() != report.columns.size()) {
            throw InvalidArgument("report row width does not match its columns");
        }
        first = true;
        if (!report.label_column.empty()) {
            out << row.label;
            first = false;
        }
        for (double v : row.values) {
            if (!first) out << ',';
            out << csv::format_real(v);
            first = false;
        }
        out << '\n';
    }
    return out.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) { write_text(path, doc.dump(2) + "\n"); }

}  // namespace domcx
