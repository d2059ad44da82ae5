#pragma once

// Command-line surface: JSON run configuration, domain construction from
// config entries, run-directory persistence and the four subcommands.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "domcx/dataset.hpp"
#include "domcx/experiments.hpp"
#include "domcx/population.hpp"

namespace domcx::cli {

/// One JSON document per run. After resolve() every default is explicit,
/// every generator seed is filled in and every path is absolute, so the
/// persisted copy reruns the same computation.
struct RunConfig {
    std::uint64_t seed = 0;
    double test_fraction = kDefaultTestFraction;
    std::string kernels = "auto";
    CapabilityMeasure measure = CapabilityMeasure::params;
    PopulationConfig population{};
    nlohmann::json domains = nlohmann::json::array();

    // Experiment-specific sections; empty when unused.
    nlohmann::json clusters = nlohmann::json::object();  // ClusterConfig fields
    std::vector<double> separations;
    nlohmann::json source = nlohmann::json::object();    // domain spec
    std::vector<std::size_t> class_counts;
    std::size_t repeats = 3;
    double capability_threshold = 5.0;
    nlohmann::json sweep = nlohmann::json::object();     // {domain, parameter, values}
};

/// Parses a config document. Unknown keys are rejected (InvalidArgument).
/// Relative paths are resolved against `base_dir`.
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Fills generator seeds derived from the master seed and per-domain defaults.
void resolve(RunConfig& config);

nlohmann::json to_json(const RunConfig& config);

/// Builds a dataset from a resolved domain spec.
TaskDataset build_domain(const nlohmann::json& spec);

/// Image shape of a domain spec: explicit height/width, or 32x32 for CIFAR,
/// or the IDX header shape. Throws InvalidArgument when unknown.
struct ImageShape {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t levels = 256;
};
ImageShape image_shape(const nlohmann::json& spec);

/// The values of a sweep section: "values" or an inclusive "range" [start, stop, step].
std::vector<double> sweep_values(const nlohmann::json& sweep);

/// Runs the command line; returns the process exit status. Failures are
/// reported as an error record (error.json plus one line on `err`).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace domcx::cli
