#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "domcx/dataset.hpp"
#include "domcx/nn.hpp"

namespace domcx {

struct IntRange {
    std::size_t min = 0;
    std::size_t max = 0;

    friend bool operator==(const IntRange&, const IntRange&) = default;
};

struct PopulationConfig {
    std::size_t population_size = 30;
    IntRange hidden_layers{0, 3};
    IntRange nodes_per_layer{2, 64};
    TrainingProtocol protocol{};
    std::uint64_t master_seed = 0;

    void validate() const;
};

/// One sampled agent topology. capability_params is only known once the agent
/// is bound to a domain's input/output sizes (see bind_agent); it is 0 before.
struct AgentSpec {
    std::size_t index = 0;
    std::vector<std::size_t> hidden_sizes;
    std::uint64_t init_seed = 0;
    std::size_t capability_params = 0;
    std::size_t capability_nl = 1;

    friend bool operator==(const AgentSpec&, const AgentSpec&) = default;
};

/// Total hidden nodes x number of hidden layers; 1 with no hidden layer.
std::size_t nodes_layers_product(std::span<const std::size_t> hidden_sizes) noexcept;

std::vector<std::size_t> agent_topology(const AgentSpec& agent, std::size_t inputs, std::size_t classes);

/// Fills capability_params for a (inputs, classes) domain.
AgentSpec bind_agent(AgentSpec agent, std::size_t inputs, std::size_t classes);

enum class CapabilityMeasure { params, nodes_layers };

CapabilityMeasure parse_capability_measure(std::string_view name);
std::string_view capability_measure_name(CapabilityMeasure measure) noexcept;

struct CapabilityScore {
    AgentSpec agent;
    double capability = 0.0;
    double score = 0.0;
    std::string domain_name;

    friend bool operator==(const CapabilityScore&, const CapabilityScore&) = default;
};

/// Agent i depends only on (master_seed, i): growing population_size never
/// changes earlier agents.
std::vector<AgentSpec> sample_population(const PopulationConfig& config);

struct RunOptions {
    std::size_t jobs = 1;
    /// Called once per completed epoch of every agent (any thread); used by tests
    /// to count epochs.
    EpochObserver epoch_observer{};
};

/// Trains and evaluates every agent on `domain` under the same protocol. The
/// per-agent shuffle seed is derived from protocol.shuffle_seed and the agent's
/// init seed. Output is ordered by agent regardless of scheduling. A failing
/// agent re-raises its error with "agent <i>: " prepended.
std::vector<CapabilityScore> run_population(std::span<const AgentSpec> population, const TaskDataset& domain,
                                            const TrainingProtocol& protocol, CapabilityMeasure measure,
                                            const RunOptions& options = {});

/// columns: domain,agent_index,hidden_sizes,capability_params,capability_nl,score
/// hidden_sizes is ';'-joined (empty for no hidden layer).
void write_population_csv(std::span<const CapabilityScore> scores, const std::filesystem::path& path);
std::vector<CapabilityScore> read_population_csv(const std::filesystem::path& path, CapabilityMeasure measure);

}  // namespace domcx
