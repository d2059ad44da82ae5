#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "domcx/cli.hpp"
#include "domcx/csv.hpp"
#include "domcx/entropy.hpp"
#include "domcx/error.hpp"
#include "domcx/estimation.hpp"
#include "domcx/kernels.hpp"
#include "domcx/report.hpp"

namespace domcx::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOptions {
    std::string config;
    std::string out = "runs";
    std::optional<std::uint64_t> seed;
    std::size_t jobs = 1;
    std::optional<std::string> kernels;
};

struct RefitOptions {
    std::string run_dir;
    std::optional<std::string> capability;
    std::optional<double> score_min;
    std::optional<double> score_max;
};

// Where the error record goes if a command fails after choosing a directory.
struct Context {
    fs::path record_dir;
};

std::string utc_stamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
    return buf;
}

fs::path make_run_dir(const fs::path& out, const std::string& id, std::uint64_t seed, Context& ctx) {
    fs::create_directories(out);
    ctx.record_dir = out;
    const std::string stem = id + "_" + utc_stamp() + "_" + std::to_string(seed);
    fs::path dir = out / stem;
    for (int i = 2; fs::exists(dir); ++i) dir = out / (stem + "_" + std::to_string(i));
    fs::create_directories(dir);
    ctx.record_dir = dir;
    return dir;
}

RunConfig prepare(const CommonOptions& o) {
    if (o.config.empty()) throw InvalidArgument("--config is required");
    RunConfig c = load_run_config(o.config);
    if (o.seed) c.seed = *o.seed;
    if (o.kernels) c.kernels = *o.kernels;
    resolve(c);
    kernels::select(kernels::parse_backend(c.kernels));
    return c;
}

ExperimentOptions experiment_options(const RunConfig& c, const CommonOptions& o) {
    ExperimentOptions e;
    e.run.jobs = o.jobs;
    e.measure = c.measure;
    e.test_fraction = c.test_fraction;
    return e;
}

std::string results_csv(const std::vector<ComplexityResult>& results) {
    std::ostringstream s;
    s << "domain,raw_auc,ci_halfwidth,v_min,v_max,slope,intercept,mse,n\n";
    for (const auto& r : results) {
        s << r.domain_name << ',' << csv::format_real(r.raw_auc) << ',' << csv::format_real(r.ci_halfwidth) << ','
          << csv::format_real(r.v_min) << ',' << csv::format_real(r.v_max) << ',' << csv::format_real(r.fit.slope)
          << ',' << csv::format_real(r.fit.intercept) << ',' << csv::format_real(r.fit.mse) << ',' << r.fit.n << '\n';
    }
    return s.str();
}

std::string normalized_csv(const std::vector<ComplexityResult>& results) {
    std::ostringstream s;
    s << "domain,normalized,ci_halfwidth\n";
    for (const auto& r : results) {
        s << r.domain_name << ',' << csv::format_real(*r.normalized) << ',' << csv::format_real(r.ci_halfwidth)
          << '\n';
    }
    return s.str();
}

void write_results(const fs::path& dir, const std::string& stem, const std::vector<ComplexityResult>& results,
                   std::ostream& out) {
    json arr = json::array();
    for (const auto& r : results) arr.push_back(to_json(r));
    write_json(dir / (stem + ".json"), json{{"results", arr}});
    write_text(dir / (stem + ".csv"), results_csv(results));
    if (results.size() >= 2) write_text(dir / (stem + "_normalized.csv"), normalized_csv(results));
    for (const auto& r : results) {
        out << r.domain_name << ": raw_auc " << csv::format_real(r.raw_auc) << " ci_halfwidth "
            << csv::format_real(r.ci_halfwidth);
        if (r.normalized) out << " normalized " << csv::format_real(*r.normalized);
        out << '\n';
    }
}

void require_domains(const RunConfig& c, std::size_t n, const std::string& what) {
    if (c.domains.size() < n) {
        throw InvalidArgument(what + " needs at least " + std::to_string(n) + " domain" + (n == 1 ? "" : "s") +
                              " in 'domains'");
    }
}

int cmd_measure(const CommonOptions& o, std::ostream& out, Context& ctx) {
    ctx.record_dir = o.out;
    const RunConfig c = prepare(o);
    require_domains(c, 1, "measure");
    const fs::path dir = make_run_dir(o.out, "measure", c.seed, ctx);
    out << "run_dir: " << dir.string() << '\n';
    write_json(dir / "config.json", to_json(c));

    RunOptions run;
    run.jobs = o.jobs;
    std::vector<ComplexityResult> results;
    std::vector<CapabilityScore> all_scores;
    for (const auto& spec : c.domains) {
        const TaskDataset domain = build_domain(spec);
        std::vector<CapabilityScore> scores;
        results.push_back(measure_complexity(domain, c.population, c.measure, run, &scores));
        all_scores.insert(all_scores.end(), scores.begin(), scores.end());
    }
    if (results.size() >= 2) normalize_results(results);
    write_population_csv(all_scores, dir / "population.csv");
    write_results(dir, "results", results, out);
    return 0;
}

int cmd_entropy(const CommonOptions& o, bool pair, std::ostream& out, Context& ctx) {
    ctx.record_dir = o.out;
    const RunConfig c = prepare(o);
    require_domains(c, pair ? 2 : 1, pair ? "entropy --pair" : "entropy");
    const fs::path dir = make_run_dir(o.out, "entropy", c.seed, ctx);
    out << "run_dir: " << dir.string() << '\n';
    write_json(dir / "config.json", to_json(c));

    std::vector<ImageDomain> domains;
    std::vector<EntropyResult> entropies;
    for (const auto& spec : c.domains) {
        TaskDataset data = build_domain(spec);
        const ImageShape shape = image_shape(spec);
        entropies.push_back(dataset_entropy(data, shape.height, shape.width, shape.levels));
        domains.push_back({std::move(data), shape.height, shape.width, shape.levels});
    }
    entropies = entropic_predictions(std::move(entropies));

    json arr = json::array();
    std::ostringstream table;
    table << "domain,mean_local_entropy,label_term,total_per_image,normalized\n";
    for (const auto& e : entropies) {
        arr.push_back(to_json(e));
        table << e.domain_name << ',' << csv::format_real(e.mean_local_entropy) << ','
              << csv::format_real(e.label_term) << ',' << csv::format_real(e.total_per_image) << ','
              << csv::format_real(*e.normalized) << '\n';
        out << e.domain_name << ": total_per_image " << csv::format_real(e.total_per_image) << " normalized "
            << csv::format_real(*e.normalized) << '\n';
    }
    write_json(dir / "entropy.json", json{{"results", arr}});
    write_text(dir / "entropy.csv", table.str());

    if (pair) {
        const auto report = run_entropy_experiment(domains, c.population, experiment_options(c, o));
        write_json(dir / "pair.json", to_json(report));
        write_text(dir / "pair.csv", report_csv(report));
        for (const auto& [k, v] : report.summary) out << k << ": " << csv::format_real(v) << '\n';
    }
    return 0;
}

DomainBuilder spec_builder(const json& base, const std::string& parameter) {
    if (!base.contains(parameter) || !base[parameter].is_number()) {
        throw InvalidArgument("sweep: parameter '" + parameter + "' is not a numeric field of the " +
                              base.at("type").get<std::string>() + " domain");
    }
    return [base, parameter](double v) {
        json spec = base;
        if (spec[parameter].is_number_unsigned() || spec[parameter].is_number_integer()) {
            if (v < 0.0 || v != std::floor(v)) {
                throw InvalidArgument("sweep: parameter '" + parameter + "' takes non-negative integers");
            }
            spec[parameter] = static_cast<std::uint64_t>(v);
        } else {
            spec[parameter] = v;
        }
        spec["name"] = base.at("name").get<std::string>() + "_" + parameter + "_" + csv::format_real(v);
        return build_domain(spec);
    };
}

int cmd_experiment(const std::string& kind, const CommonOptions& o, std::ostream& out, Context& ctx) {
    ctx.record_dir = o.out;
    if (kind != "clusters" && kind != "classes" && kind != "agents" && kind != "sweep") {
        throw InvalidArgument("unknown experiment '" + kind + "' (clusters|classes|agents|sweep)");
    }
    const RunConfig c = prepare(o);
    ExperimentOptions opts = experiment_options(c, o);

    // Validate inputs before creating the run directory.
    if (kind == "clusters" && c.separations.empty()) throw InvalidArgument("clusters: 'separations' is required");
    if (kind == "classes") {
        if (c.source.empty()) throw InvalidArgument("classes: 'source' domain is required");
        if (c.class_counts.empty()) throw InvalidArgument("classes: 'class_counts' is required");
    }
    if (kind == "agents") require_domains(c, 2, "agents");
    if (kind == "sweep" && c.sweep.empty()) throw InvalidArgument("sweep: 'sweep' section is required");

    const fs::path dir = make_run_dir(o.out, kind, c.seed, ctx);
    out << "run_dir: " << dir.string() << '\n';
    write_json(dir / "config.json", to_json(c));

    ExperimentReport report;
    if (kind == "clusters") {
        ClusterConfig base;
        base.dims = c.clusters.at("dims").get<std::size_t>();
        base.sigma = c.clusters.at("sigma").get<double>();
        base.samples_per_cluster = c.clusters.at("samples_per_cluster").get<std::size_t>();
        base.seed = c.clusters.at("seed").get<std::uint64_t>();
        opts.test_fraction = c.clusters.at("test_fraction").get<double>();
        report = run_cluster_experiment(c.separations, base, c.population, opts);
    } else if (kind == "classes") {
        report = run_class_experiment(build_domain(c.source), c.class_counts, c.repeats, c.population, opts);
    } else if (kind == "agents") {
        std::vector<TaskDataset> domains;
        for (const auto& spec : c.domains) domains.push_back(build_domain(spec));
        report = run_agent_dependency(domains, c.population, c.capability_threshold, opts);
    } else {
        const auto values = c.sweep.at("values").get<std::vector<double>>();
        const auto parameter = c.sweep.at("parameter").get<std::string>();
        report = run_parameter_sweep(values, spec_builder(c.sweep.at("domain"), parameter), c.population, opts);
        report.metadata["parameter"] = parameter;
    }
    report.metadata["config"] = to_json(c);
    write_json(dir / "report.json", to_json(report));
    write_text(dir / "report.csv", report_csv(report));
    for (const auto& [k, v] : report.summary) out << k << ": " << csv::format_real(v) << '\n';
    return 0;
}

int cmd_refit(const RefitOptions& r, const CommonOptions& o, bool out_given, std::ostream& out, Context& ctx) {
    const fs::path run_dir = r.run_dir;
    ctx.record_dir = out_given ? fs::path(o.out) : run_dir;

    CapabilityMeasure measure = CapabilityMeasure::params;
    const fs::path config_path = !o.config.empty() ? fs::path(o.config) : run_dir / "config.json";
    if (fs::exists(config_path)) measure = load_run_config(config_path).measure;
    if (r.capability) measure = parse_capability_measure(*r.capability);

    const auto scores = read_population_csv(run_dir / "population.csv", measure);
    std::vector<std::string> order;
    std::map<std::string, std::vector<CapabilityScore>> by_domain;
    for (const auto& s : scores) {
        if (!by_domain.contains(s.domain_name)) order.push_back(s.domain_name);
        by_domain[s.domain_name].push_back(s);
    }
    if (order.empty()) throw DegenerateInput("population cache has no rows");

    ScoreWindow window{r.score_min, r.score_max};
    std::vector<ComplexityResult> results;
    for (const auto& name : order) results.push_back(estimate_complexity(by_domain[name], name, window));
    if (results.size() >= 2) normalize_results(results);

    const fs::path dir = ctx.record_dir;
    fs::create_directories(dir);
    out << "run_dir: " << dir.string() << '\n';
    write_results(dir, "refit", results, out);
    return 0;
}

void write_error_record(const fs::path& dir, const std::string& kind, const std::string& message, std::ostream& err) {
    err << "error: " << kind << ": " << message << '\n';
    if (dir.empty()) return;
    try {
        fs::create_directories(dir);
        write_json(dir / "error.json", json{{"error", kind}, {"message", message}});
    } catch (const std::exception&) {
        // The record on stderr is all that can be done.
    }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Estimate dataset complexity from populations of trained networks."};
    app.require_subcommand(1);

    CommonOptions common;
    bool out_given = false;
    auto add_common = [&](CLI::App* sub, bool config_required) {
        auto* c = sub->add_option("--config", common.config, "JSON run configuration");
        if (config_required) c->required();
        sub->add_option_function<std::string>(
            "--out",
            [&](const std::string& v) {
                common.out = v;
                out_given = true;
            },
            "output directory (default: runs)");
        sub->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t v) { common.seed = v; },
                                                "master seed, overrides the config");
        sub->add_option("--jobs", common.jobs, "worker threads for population training")
            ->check(CLI::PositiveNumber);
        sub->add_option_function<std::string>("--kernels", [&](const std::string& v) { common.kernels = v; },
                                              "kernel backend: auto|scalar|avx2");
    };

    auto* measure = app.add_subcommand("measure", "measure complexity of each configured domain");
    add_common(measure, true);

    bool pair = false;
    auto* entropy = app.add_subcommand("entropy", "entropic prediction for each configured image domain");
    add_common(entropy, true);
    entropy->add_flag("--pair", pair, "also measure complexity and pair both normalised values");

    std::string kind;
    auto* experiment = app.add_subcommand("experiment", "run a scripted study");
    experiment->add_option("kind", kind, "clusters|classes|agents|sweep")->required();
    add_common(experiment, true);

    RefitOptions refit_opts;
    auto* refit = app.add_subcommand("refit", "re-estimate complexity from a run's cached population scores");
    refit->add_option("run_dir", refit_opts.run_dir, "run directory holding population.csv")->required();
    add_common(refit, false);
    refit->add_option_function<std::string>("--capability", [&](const std::string& v) { refit_opts.capability = v; },
                                            "params|nodes_layers");
    refit->add_option_function<double>("--score-min", [&](double v) { refit_opts.score_min = v; },
                                       "lower edge of the integration window");
    refit->add_option_function<double>("--score-max", [&](double v) { refit_opts.score_max = v; },
                                       "upper edge of the integration window");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }

    Context ctx;
    try {
        if (*measure) return cmd_measure(common, out, ctx);
        if (*entropy) return cmd_entropy(common, pair, out, ctx);
        if (*experiment) return cmd_experiment(kind, common, out, ctx);
        if (*refit) return cmd_refit(refit_opts, common, out_given, out, ctx);
    } catch (const Error& e) {
        write_error_record(ctx.record_dir, std::string(error_kind_name(e.kind())), e.what(), err);
        return 1;
    } catch (const fs::filesystem_error& e) {
        write_error_record(ctx.record_dir, "FormatError", e.what(), err);
        return 1;
    } catch (const std::exception& e) {
        write_error_record(ctx.record_dir, "InternalError", e.what(), err);
        return 1;
    }
    return 1;
}

}  // namespace domcx::cli
