#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "domcx/domains.hpp"
#include "domcx/error.hpp"
#include "domcx/population.hpp"
#include "domcx/rng.hpp"
#include "oracles.hpp"

using namespace domcx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "domcx_test_population";
    fs::create_directories(dir);
    return dir / name;
}

TaskDataset separated_clusters() {
    ClusterConfig c;
    c.separation = 12.0;
    c.samples_per_cluster = 100;
    c.seed = 2;
    return make_clusters(c);
}

PopulationConfig small_config(std::size_t size) {
    PopulationConfig p;
    p.population_size = size;
    p.hidden_layers = {0, 2};
    p.nodes_per_layer = {2, 12};
    p.protocol.epochs = 5;
    p.master_seed = 77;
    return p;
}

}  // namespace

TEST_CASE("config validation") {
    PopulationConfig p;
    CHECK_NOTHROW(p.validate());
    p.population_size = 0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = {};
    p.hidden_layers = {3, 1};
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = {};
    p.nodes_per_layer = {0, 4};
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("degenerate ranges share one topology") {
    PopulationConfig p;
    p.population_size = 10;
    p.hidden_layers = {2, 2};
    p.nodes_per_layer = {5, 5};
    const auto pop = sample_population(p);
    std::set<std::uint64_t> seeds;
    for (const auto& a : pop) {
        CHECK(a.hidden_sizes == std::vector<std::size_t>{5, 5});
        seeds.insert(a.init_seed);
    }
    CHECK(seeds.size() == 10);
}

TEST_CASE("sampling is deterministic and prefix stable") {
    PopulationConfig p;
    p.population_size = 20;
    p.master_seed = 5;
    const auto a = sample_population(p);
    CHECK(a == sample_population(p));
    p.population_size = 35;
    const auto b = sample_population(p);
    CHECK(std::equal(a.begin(), a.end(), b.begin()));
    for (std::size_t i = 0; i < b.size(); ++i) {
        CHECK(b[i].index == i);
        CHECK(b[i].capability_params == 0);
        CHECK(b[i].capability_nl == nodes_layers_product(b[i].hidden_sizes));
        for (auto h : b[i].hidden_sizes) {
            CHECK(h >= p.nodes_per_layer.min);
            CHECK(h <= p.nodes_per_layer.max);
        }
    }
    p.master_seed = 6;
    CHECK_FALSE(sample_population(p) == b);
}

TEST_CASE("layer counts are uniform") {
    PopulationConfig p;
    p.population_size = 200;
    p.hidden_layers = {1, 3};
    p.nodes_per_layer = {2, 64};
    p.master_seed = 9;
    std::vector<std::size_t> counts(3, 0);
    for (const auto& a : sample_population(p)) ++counts.at(a.hidden_sizes.size() - 1);
    // 99% critical value of chi-squared with 2 degrees of freedom.
    CHECK(oracle::chi_squared_uniform(counts) < 9.210340371976184);
}

TEST_CASE("capabilities") {
    CHECK(nodes_layers_product(std::vector<std::size_t>{}) == 1);
    CHECK(nodes_layers_product(std::vector<std::size_t>{3, 5}) == 16);
    CHECK(nodes_layers_product(std::vector<std::size_t>{7}) == 7);
    AgentSpec a;
    a.hidden_sizes = {8};
    const auto bound = bind_agent(a, 4, 2);
    CHECK(bound.capability_params == 58);
    CHECK(agent_topology(a, 4, 2) == std::vector<std::size_t>{4, 8, 2});
    CHECK(parse_capability_measure("nodes_layers") == CapabilityMeasure::nodes_layers);
    CHECK(capability_measure_name(CapabilityMeasure::params) == "params");
    CHECK_THROWS_AS(parse_capability_measure("flops"), InvalidArgument);

    // More nodes in the same layout never lowers the parameter count.
    std::size_t prev = 0;
    for (std::size_t h = 1; h < 20; ++h) {
        AgentSpec g;
        g.hidden_sizes = {h, h};
        const auto c = bind_agent(g, 3, 4).capability_params;
        CHECK(c > prev);
        prev = c;
    }
}

TEST_CASE("a single agent is train then evaluate") {
    const auto domain = separated_clusters();
    const auto config = small_config(1);
    const auto pop = sample_population(config);
    const auto scores = run_population(pop, domain, config.protocol, CapabilityMeasure::params);
    REQUIRE(scores.size() == 1);
    TrainingProtocol p = config.protocol;
    p.shuffle_seed = derive_seed(config.protocol.shuffle_seed, {pop[0].init_seed});
    const auto topo = agent_topology(pop[0], domain.dims(), domain.class_count());
    const auto net = train(MlpNetwork::initialize(topo, pop[0].init_seed), domain, p);
    CHECK(scores[0].score == evaluate(net, domain));
    CHECK(scores[0].capability == static_cast<double>(param_count(topo)));
    CHECK(scores[0].domain_name == domain.name());
}

TEST_CASE("single-class domain scores 1.0 everywhere") {
    std::vector<double> f(60);
    std::iota(f.begin(), f.end(), 0.0);
    const auto d = TaskDataset::with_random_split("one", 2, f, std::vector<int>(30, 0), 1, 0.3, 1);
    const auto config = small_config(6);
    for (const auto& s : run_population(sample_population(config), d, config.protocol, CapabilityMeasure::params)) {
        CHECK(s.score == 1.0);
    }
}

TEST_CASE("far-separated clusters are solved by most agents") {
    const auto domain = separated_clusters();
    PopulationConfig config;
    config.population_size = 30;
    config.master_seed = 4;
    const auto scores = run_population(sample_population(config), domain, config.protocol, CapabilityMeasure::params);
    std::size_t good = 0;
    for (const auto& s : scores) good += s.score >= 0.9 ? 1 : 0;
    CHECK(static_cast<double>(good) >= 0.9 * 30);
}

TEST_CASE("parallel runs match serial runs and report every epoch") {
    const auto domain = separated_clusters();
    const auto config = small_config(9);
    const auto pop = sample_population(config);
    std::atomic<std::size_t> epochs{0};
    RunOptions serial;
    serial.epoch_observer = [&](const EpochStats&) { ++epochs; };
    const auto a = run_population(pop, domain, config.protocol, CapabilityMeasure::nodes_layers, serial);
    CHECK(epochs.load() == 9 * config.protocol.epochs);
    RunOptions parallel;
    parallel.jobs = 4;
    const auto b = run_population(pop, domain, config.protocol, CapabilityMeasure::nodes_layers, parallel);
    CHECK(a == b);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].agent.index == i);
        CHECK(a[i].capability == static_cast<double>(a[i].agent.capability_nl));
    }
}

TEST_CASE("agent failures carry the agent index") {
    std::vector<double> f(20, 0.0);
    const TaskDataset no_test("nt", 2, f, std::vector<int>(10, 0), 1,
                              {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, {});
    const auto config = small_config(3);
    try {
        run_population(sample_population(config), no_test, config.protocol, CapabilityMeasure::params);
        FAIL("expected EmptyDataset");
    } catch (const EmptyDataset& e) {
        CHECK(std::string(e.what()).rfind("agent 0: ", 0) == 0);
    }
}

TEST_CASE("population csv round trip") {
    const auto domain = separated_clusters();
    const auto config = small_config(5);
    const auto scores = run_population(sample_population(config), domain, config.protocol, CapabilityMeasure::params);
    const auto path = scratch("pop.csv");
    write_population_csv(scores, path);
    const auto back = read_population_csv(path, CapabilityMeasure::params);
    REQUIRE(back.size() == scores.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].agent.index == scores[i].agent.index);
        CHECK(back[i].agent.hidden_sizes == scores[i].agent.hidden_sizes);
        CHECK(back[i].capability == scores[i].capability);
        CHECK(back[i].score == scores[i].score);
        CHECK(back[i].domain_name == scores[i].domain_name);
    }
    const auto nl = read_population_csv(path, CapabilityMeasure::nodes_layers);
    CHECK(nl[0].capability == static_cast<double>(scores[0].agent.capability_nl));

    {
        std::ofstream(path) << "domain,agent_index,hidden_sizes,capability_params,capability_nl,score\nd,0,4,22,4,1.5\n";
    }
    CHECK_THROWS_AS(read_population_csv(path, CapabilityMeasure::params), FormatError);
    {
        std::ofstream(path) << "domain,score\nd,0.5\n";
    }
    CHECK_THROWS_AS(read_population_csv(path, CapabilityMeasure::params), FormatError);
    CHECK_THROWS_AS(read_population_csv(scratch("absent.csv"), CapabilityMeasure::params), FormatError);
}
