#include "domcx/population.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <numeric>
#include <optional>
#include <thread>

#include "domcx/csv.hpp"
#include "domcx/error.hpp"
#include "domcx/rng.hpp"

namespace domcx {

void PopulationConfig::validate() const {
    if (population_size == 0) throw InvalidArgument("population_size must be >= 1");
    if (hidden_layers.min > hidden_layers.max) throw InvalidArgument("hidden_layers range is empty");
    if (nodes_per_layer.min == 0) throw InvalidArgument("nodes_per_layer must be >= 1");
    if (nodes_per_layer.min > nodes_per_layer.max) throw InvalidArgument("nodes_per_layer range is empty");
    protocol.validate();
}

std::size_t nodes_layers_product(std::span<const std::size_t> hidden_sizes) noexcept {
    if (hidden_sizes.empty()) return 1;
    const std::size_t nodes = std::accumulate(hidden_sizes.begin(), hidden_sizes.end(), std::size_t{0});
    return nodes * hidden_sizes.size();
}

std::vector<std::size_t> agent_topology(const AgentSpec& agent, std::size_t inputs, std::size_t classes) {
    std::vector<std::size_t> sizes;
    sizes.reserve(agent.hidden_sizes.size() + 2);
    sizes.push_back(inputs);
    sizes.insert(sizes.end(), agent.hidden_sizes.begin(), agent.hidden_sizes.end());
    sizes.push_back(classes);
    return sizes;
}

AgentSpec bind_agent(AgentSpec agent, std::size_t inputs, std::size_t classes) {
    agent.capability_params = param_count(agent_topology(agent, inputs, classes));
    agent.capability_nl = nodes_layers_product(agent.hidden_sizes);
    return agent;
}

CapabilityMeasure parse_capability_measure(std::string_view name) {
    if (name == "params") return CapabilityMeasure::params;
    if (name == "nodes_layers") return CapabilityMeasure::nodes_layers;
    throw InvalidArgument("unknown capability measure '" + std::string(name) + "' (params|nodes_layers)");
}

std::string_view capability_measure_name(CapabilityMeasure measure) noexcept {
    return measure == CapabilityMeasure::params ? "params" : "nodes_layers";
}

std::vector<AgentSpec> sample_population(const PopulationConfig& config) {
    config.validate();
    std::vector<AgentSpec> population;
    population.reserve(config.population_size);
    for (std::size_t i = 0; i < config.population_size; ++i) {
        Rng rng(derive_seed(config.master_seed, {0xa6e7u, i}));
        std::uniform_int_distribution<std::size_t> layer_dist(config.hidden_layers.min, config.hidden_layers.max);
        std::uniform_int_distribution<std::size_t> width_dist(config.nodes_per_layer.min, config.nodes_per_layer.max);
        AgentSpec agent;
        agent.index = i;
        const std::size_t layers = layer_dist(rng);
        for (std::size_t l = 0; l < layers; ++l) agent.hidden_sizes.push_back(width_dist(rng));
        agent.init_seed = derive_seed(config.master_seed, {0x1417u, i});
        agent.capability_nl = nodes_layers_product(agent.hidden_sizes);
        population.push_back(std::move(agent));
    }
    return population;
}

namespace {

CapabilityScore run_agent(const AgentSpec& spec, const TaskDataset& domain, const TrainingProtocol& protocol,
                          CapabilityMeasure measure, const EpochObserver& observer) {
    AgentSpec agent = bind_agent(spec, domain.dims(), domain.class_count());
    TrainingProtocol own = protocol;
    own.shuffle_seed = derive_seed(protocol.shuffle_seed, {agent.init_seed});
    MlpNetwork net = MlpNetwork::initialize(agent_topology(agent, domain.dims(), domain.class_count()),
                                            agent.init_seed);
    net = train(std::move(net), domain, own, observer);
    const double score = evaluate(net, domain, Partition::test);
    const double capability = measure == CapabilityMeasure::params ? static_cast<double>(agent.capability_params)
                                                                   : static_cast<double>(agent.capability_nl);
    return CapabilityScore{std::move(agent), capability, score, domain.name()};
}

}  // namespace

std::vector<CapabilityScore> run_population(std::span<const AgentSpec> population, const TaskDataset& domain,
                                            const TrainingProtocol& protocol, CapabilityMeasure measure,
                                            const RunOptions& options) {
    protocol.validate();
    const std::size_t n = population.size();
    std::vector<std::optional<CapabilityScore>> results(n);
    std::vector<std::exception_ptr> failures(n);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            try {
                results[i] = run_agent(population[i], domain, protocol, measure, options.epoch_observer);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };

    const std::size_t jobs = std::clamp<std::size_t>(options.jobs, 1, std::max<std::size_t>(n, 1));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(jobs);
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!failures[i]) continue;
        const std::string prefix = "agent " + std::to_string(population[i].index) + ": ";
        try {
            std::rethrow_exception(failures[i]);
        } catch (const Error& e) {
            throw_error(e.kind(), prefix + e.what());
        } catch (const std::exception& e) {
            throw std::runtime_error(prefix + e.what());
        }
    }
    std::vector<CapabilityScore> out;
    out.reserve(n);
    for (auto& r : results) out.push_back(std::move(*r));
    return out;
}

void write_population_csv(std::span<const CapabilityScore> scores, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
    out << "domain,agent_index,hidden_sizes,capability_params,capability_nl,score\n";
    for (const auto& s : scores) {
        out << s.domain_name << ',' << s.agent.index << ',';
        for (std::size_t i = 0; i < s.agent.hidden_sizes.size(); ++i) {
            if (i > 0) out << ';';
            out << s.agent.hidden_sizes[i];
        }
        out << ',' << s.agent.capability_params << ',' << s.agent.capability_nl << ',' << csv::format_real(s.score)
            << '\n';
    }
    if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

std::vector<CapabilityScore> read_population_csv(const std::filesystem::path& path, CapabilityMeasure measure) {
    const auto lines = csv::read_lines(path);
    if (lines.empty() || lines.front() != "domain,agent_index,hidden_sizes,capability_params,capability_nl,score") {
        throw FormatError("'" + path.string() + "' is not a population CSV");
    }
    std::vector<CapabilityScore> scores;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const auto cells = csv::split_line(lines[li]);
        if (cells.size() != 6) {
            throw FormatError("'" + path.string() + "' line " + std::to_string(li + 1) + ": expected 6 columns");
        }
        CapabilityScore s;
        s.domain_name = cells[0];
        s.agent.index = static_cast<std::size_t>(csv::parse_int(cells[1], "agent_index"));
        if (!cells[2].empty()) {
            for (const auto& w : csv::split_line(cells[2], ';')) {
                s.agent.hidden_sizes.push_back(static_cast<std::size_t>(csv::parse_int(w, "hidden size")));
            }
        }
        const auto params = csv::parse_int(cells[3], "capability_params");
        const auto nl = csv::parse_int(cells[4], "capability_nl");
        if (params <= 0 || nl <= 0) throw FormatError("'" + path.string() + "': capabilities must be positive");
        s.agent.capability_params = static_cast<std::size_t>(params);
        s.agent.capability_nl = static_cast<std::size_t>(nl);
        s.score = csv::parse_real(cells[5], "score");
        if (!(s.score >= 0.0 && s.score <= 1.0)) throw FormatError("'" + path.string() + "': score outside [0, 1]");
        s.capability = measure == CapabilityMeasure::params ? static_cast<double>(params) : static_cast<double>(nl);
        scores.push_back(std::move(s));
    }
    return scores;
}

}  // namespace domcx
