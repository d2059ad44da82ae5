#pragma once

// Scripted, seeded validation studies. Each returns an ExperimentReport whose
// rows are in sweep order and whose metadata records every seed used.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "domcx/dataset.hpp"
#include "domcx/domains.hpp"
#include "domcx/estimation.hpp"
#include "domcx/population.hpp"
#include "domcx/report.hpp"

namespace domcx {

struct ExperimentOptions {
    RunOptions run{};
    CapabilityMeasure measure = CapabilityMeasure::params;
    double test_fraction = kDefaultTestFraction;  // for domains the experiment generates itself
};

/// A dataset plus the image shape used to compute its local entropy.
struct ImageDomain {
    TaskDataset data;
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t levels = 256;
};

/// Entropic prediction vs measured complexity, both sum-normalised over the set.
ExperimentReport run_entropy_experiment(std::span<const ImageDomain> domains, const PopulationConfig& config,
                                        const ExperimentOptions& options = {});

/// Complexity of two-cluster tasks as the means move apart. x = overlap coefficient.
ExperimentReport run_cluster_experiment(std::span<const double> separations, const ClusterConfig& base,
                                        const PopulationConfig& config, const ExperimentOptions& options = {});

/// Range-normalised complexity of random k-class subsets, averaged over `repeats`.
ExperimentReport run_class_experiment(const TaskDataset& source, std::span<const std::size_t> class_counts,
                                      std::size_t repeats, const PopulationConfig& config,
                                      const ExperimentOptions& options = {});

struct AgentDependencySummary {
    std::vector<double> measured;   // sum-normalised complexity per domain
    std::vector<double> fits;       // cosine fit per agent
    double pcc_all = 0.0;
    double pcc_filtered = 0.0;      // NaN when fewer than two agents (or a constant side) pass the threshold
    double min_fit = 0.0;
    std::size_t filtered_count = 0;
};

/// Pure arithmetic of the agent-dependency study. `scores` is agents x domains.
AgentDependencySummary agent_dependency_summary(std::span<const std::vector<double>> scores,
                                                std::span<const double> complexity,
                                                std::span<const double> capabilities, double capability_threshold);

/// The same population trained on every domain; each agent's per-domain score
/// vector is compared with the measured complexity vector by cosine similarity.
ExperimentReport run_agent_dependency(std::span<const TaskDataset> domains, const PopulationConfig& config,
                                      double capability_threshold = 5.0, const ExperimentOptions& options = {});

using DomainBuilder = std::function<TaskDataset(double)>;

/// One complexity measurement per parameter value.
ExperimentReport run_parameter_sweep(std::span<const double> values, const DomainBuilder& build,
                                     const PopulationConfig& config, const ExperimentOptions& options = {});

/// Builder varying the cart-pole push force.
DomainBuilder cartpole_force_builder(CartpoleConfig base, double test_fraction = kDefaultTestFraction);

}  // namespace domcx
