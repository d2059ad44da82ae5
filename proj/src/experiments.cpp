#include "domcx/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "domcx/csv.hpp"
#include "domcx/entropy.hpp"
#include "domcx/error.hpp"
#include "domcx/rng.hpp"
#include "domcx/stats.hpp"

namespace domcx {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <typename F>
double or_nan(F&& f) {
    try {
        return f();
    } catch (const DegenerateInput&) {
        return kNaN;
    }
}

nlohmann::json base_metadata(const PopulationConfig& config, const ExperimentOptions& options) {
    return nlohmann::json{
        {"population", to_json(config)},
        {"capability_measure", capability_measure_name(options.measure)},
        {"test_fraction", options.test_fraction},
    };
}

// OLS slope of y on x over the points where keep(x) holds; NaN with < 2 distinct x.
template <typename Keep>
double segment_slope(std::span<const double> x, std::span<const double> y, Keep keep) {
    std::vector<Point> pts;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (keep(x[i])) pts.emplace_back(x[i], y[i]);
    }
    return or_nan([&] { return fit_linear(pts).slope; });
}

}  // namespace

ExperimentReport run_entropy_experiment(std::span<const ImageDomain> domains, const PopulationConfig& config,
                                        const ExperimentOptions& options) {
    if (domains.size() < 2) throw InvalidArgument("entropy experiment needs at least two datasets");
    std::vector<EntropyResult> entropies;
    std::vector<ComplexityResult> complexities;
    for (const auto& d : domains) {
        entropies.push_back(dataset_entropy(d.data, d.height, d.width, d.levels));
        complexities.push_back(measure_complexity(d.data, config, options.measure, options.run));
    }
    entropies = entropic_predictions(std::move(entropies));
    normalize_results(complexities);

    ExperimentReport report;
    report.experiment_id = "entropy";
    report.description = "entropic prediction vs complexity, both sum-normalised per domain";
    report.label_column = "domain";
    report.columns = {"entropic_prediction", "complexity", "ci_halfwidth", "entropy_total", "raw_auc"};
    std::vector<double> ent;
    std::vector<double> cx;
    double max_gap = 0.0;
    for (std::size_t i = 0; i < domains.size(); ++i) {
        const double e = *entropies[i].normalized;
        const double c = *complexities[i].normalized;
        ent.push_back(e);
        cx.push_back(c);
        max_gap = std::max(max_gap, std::abs(e - c));
        report.rows.push_back({domains[i].data.name(),
                               {e, c, complexities[i].ci_halfwidth, entropies[i].total_per_image,
                                complexities[i].raw_auc}});
    }
    report.summary = {
        {"max_abs_difference", max_gap},
        {"pearson", or_nan([&] { return pearson(ent, cx); })},
        {"spearman", or_nan([&] { return spearman(ent, cx); })},
    };
    report.metadata = base_metadata(config, options);
    nlohmann::json shapes = nlohmann::json::array();
    for (const auto& d : domains) {
        shapes.push_back({{"domain", d.data.name()}, {"height", d.height}, {"width", d.width}, {"levels", d.levels}});
    }
    report.metadata["images"] = std::move(shapes);
    return report;
}

ExperimentReport run_cluster_experiment(std::span<const double> separations, const ClusterConfig& base,
                                        const PopulationConfig& config, const ExperimentOptions& options) {
    if (separations.empty()) throw InvalidArgument("cluster experiment needs at least one separation");
    std::vector<ComplexityResult> results;
    std::vector<double> overlaps;
    for (double sep : separations) {
        ClusterConfig cc = base;
        cc.separation = sep;
        const TaskDataset domain = make_clusters(cc, options.test_fraction).renamed("clusters_sep_" + csv::format_real(sep));
        results.push_back(measure_complexity(domain, config, options.measure, options.run));
        overlaps.push_back(overlap_coefficient(sep, base.sigma));
    }
    normalize_results(results);

    ExperimentReport report;
    report.experiment_id = "clusters";
    report.description = "complexity of a two-cluster task vs cluster overlap";
    report.columns = {"separation", "overlap", "complexity", "normalized", "ci_halfwidth", "v_min", "v_max", "slope"};
    std::vector<double> raw;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        raw.push_back(r.raw_auc);
        report.rows.push_back({"",
                               {separations[i], overlaps[i], r.raw_auc, *r.normalized, r.ci_halfwidth, r.v_min,
                                r.v_max, r.fit.slope}});
    }
    report.summary = {
        {"spearman_overlap_complexity", or_nan([&] { return spearman(overlaps, raw); })},
        {"slope_high_overlap", segment_slope(overlaps, raw, [](double o) { return o >= 0.3; })},
        {"slope_low_overlap", segment_slope(overlaps, raw, [](double o) { return o < 0.3; })},
    };
    report.metadata = base_metadata(config, options);
    report.metadata["clusters"] = {{"dims", base.dims},
                                   {"sigma", base.sigma},
                                   {"samples_per_cluster", base.samples_per_cluster},
                                   {"seed", base.seed},
                                   {"separations", std::vector<double>(separations.begin(), separations.end())}};
    return report;
}

ExperimentReport run_class_experiment(const TaskDataset& source, std::span<const std::size_t> class_counts,
                                      std::size_t repeats, const PopulationConfig& config,
                                      const ExperimentOptions& options) {
    if (class_counts.empty()) throw InvalidArgument("class experiment needs at least one class count");
    if (repeats == 0) throw InvalidArgument("class experiment needs repeats >= 1");
    for (std::size_t k : class_counts) {
        if (k < 1 || k > source.class_count()) {
            throw InvalidArgument("class count " + std::to_string(k) + " outside [1, " +
                                  std::to_string(source.class_count()) + "]");
        }
    }
    ExperimentReport report;
    report.experiment_id = "classes";
    report.description = "range-normalised complexity vs number of classes (mean over random subsets)";
    report.columns = {"class_count", "complexity_mean", "complexity_std", "ci_halfwidth_mean", "raw_auc_mean"};

    std::vector<double> counts;
    std::vector<double> means;
    nlohmann::json subset_seeds = nlohmann::json::array();
    for (std::size_t k : class_counts) {
        std::vector<double> values;
        std::vector<double> cis;
        std::vector<double> raws;
        for (std::size_t r = 0; r < repeats; ++r) {
            const std::uint64_t seed = derive_seed(config.master_seed, {0xc1a55u, k, r});
            subset_seeds.push_back({{"class_count", k}, {"repeat", r}, {"seed", seed}});
            const TaskDataset subset = class_subset(source, k, seed);
            const auto res = measure_complexity(subset, config, options.measure, options.run);
            values.push_back(range_normalize(res.raw_auc, res.v_min, res.v_max));
            cis.push_back(res.ci_halfwidth);
            raws.push_back(res.raw_auc);
        }
        counts.push_back(static_cast<double>(k));
        means.push_back(mean(values));
        report.rows.push_back(
            {"", {static_cast<double>(k), means.back(), sample_stddev(values), mean(cis), mean(raws)}});
    }
    double first_inc = kNaN;
    double last_inc = kNaN;
    if (means.size() >= 2) {
        first_inc = means[1] - means[0];
        last_inc = means[means.size() - 1] - means[means.size() - 2];
    }
    report.summary = {
        {"spearman_count_complexity", or_nan([&] { return spearman(counts, means); })},
        {"first_increment", first_inc},
        {"last_increment", last_inc},
    };
    report.metadata = base_metadata(config, options);
    report.metadata["source"] = {{"name", source.name()}, {"class_count", source.class_count()}};
    report.metadata["repeats"] = repeats;
    report.metadata["subset_seeds"] = std::move(subset_seeds);
    return report;
}

AgentDependencySummary agent_dependency_summary(std::span<const std::vector<double>> scores,
                                                std::span<const double> complexity,
                                                std::span<const double> capabilities, double capability_threshold) {
    if (complexity.size() < 2) throw InvalidArgument("agent dependency needs at least two domains");
    if (scores.size() < 2) throw InvalidArgument("agent dependency needs at least two agents");
    if (capabilities.size() != scores.size()) throw InvalidArgument("one capability per agent is required");

    AgentDependencySummary out;
    out.measured = sum_normalize(complexity);
    for (const auto& row : scores) {
        if (row.size() != complexity.size()) throw InvalidArgument("score row length differs from domain count");
        const auto prediction = sum_normalize(row);
        out.fits.push_back(cosine_similarity(prediction, out.measured));
    }
    out.min_fit = *std::min_element(out.fits.begin(), out.fits.end());
    out.pcc_all = or_nan([&] { return pearson(capabilities, out.fits); });

    std::vector<double> cap_f;
    std::vector<double> fit_f;
    for (std::size_t i = 0; i < capabilities.size(); ++i) {
        if (capabilities[i] >= capability_threshold) {
            cap_f.push_back(capabilities[i]);
            fit_f.push_back(out.fits[i]);
        }
    }
    out.filtered_count = cap_f.size();
    out.pcc_filtered = cap_f.size() >= 2 ? or_nan([&] { return pearson(cap_f, fit_f); }) : kNaN;
    return out;
}

ExperimentReport run_agent_dependency(std::span<const TaskDataset> domains, const PopulationConfig& config,
                                      double capability_threshold, const ExperimentOptions& options) {
    if (domains.size() < 2) throw InvalidArgument("agent dependency needs at least two domains");
    if (config.population_size < 2) throw InvalidArgument("agent dependency needs at least two agents");

    const auto population = sample_population(config);
    std::vector<double> complexity;
    std::vector<std::vector<double>> scores(population.size());
    for (const auto& domain : domains) {
        const auto run = run_population(population, domain, config.protocol, options.measure, options.run);
        complexity.push_back(estimate_complexity(run, domain.name()).raw_auc);
        for (std::size_t a = 0; a < run.size(); ++a) scores[a].push_back(run[a].score);
    }
    std::vector<double> capabilities;
    for (const auto& agent : population) capabilities.push_back(static_cast<double>(agent.capability_nl));

    const auto summary = agent_dependency_summary(scores, complexity, capabilities, capability_threshold);

    ExperimentReport report;
    report.experiment_id = "agents";
    report.description = "per-agent complexity fit (cosine similarity) vs nodes x layers capability";
    report.columns = {"agent_index", "capability_nl", "fit"};
    for (std::size_t a = 0; a < population.size(); ++a) {
        report.rows.push_back({"", {static_cast<double>(a), capabilities[a], summary.fits[a]}});
    }
    report.summary = {
        {"pcc_all", summary.pcc_all},
        {"pcc_filtered", summary.pcc_filtered},
        {"min_fit", summary.min_fit},
        {"filtered_count", static_cast<double>(summary.filtered_count)},
    };
    report.metadata = base_metadata(config, options);
    report.metadata["capability_threshold"] = capability_threshold;
    nlohmann::json doms = nlohmann::json::array();
    for (std::size_t d = 0; d < domains.size(); ++d) {
        doms.push_back({{"domain", domains[d].name()},
                        {"raw_auc", real_json(complexity[d])},
                        {"normalized", real_json(summary.measured[d])}});
    }
    report.metadata["domains"] = std::move(doms);
    return report;
}

ExperimentReport run_parameter_sweep(std::span<const double> values, const DomainBuilder& build,
                                     const PopulationConfig& config, const ExperimentOptions& options) {
    if (values.empty()) throw InvalidArgument("parameter sweep needs at least one value");
    std::vector<ComplexityResult> results;
    for (double v : values) results.push_back(measure_complexity(build(v), config, options.measure, options.run));
    normalize_results(results);

    ExperimentReport report;
    report.experiment_id = "sweep";
    report.description = "complexity vs domain parameter";
    report.columns = {"parameter", "complexity", "normalized", "ci_halfwidth", "v_min", "v_max"};
    std::vector<double> raw;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        raw.push_back(r.raw_auc);
        report.rows.push_back({"", {values[i], r.raw_auc, *r.normalized, r.ci_halfwidth, r.v_min, r.v_max}});
    }
    report.summary = {
        {"pcc_parameter_complexity", or_nan([&] { return pearson(values, raw); })},
        {"spearman_parameter_complexity", or_nan([&] { return spearman(values, raw); })},
    };
    report.metadata = base_metadata(config, options);
    report.metadata["values"] = std::vector<double>(values.begin(), values.end());
    return report;
}

DomainBuilder cartpole_force_builder(CartpoleConfig base, double test_fraction) {
    return [base, test_fraction](double force) {
        CartpoleConfig c = base;
        c.force_mag = force;
        return cartpole_dataset(c, test_fraction).renamed("cartpole_force_" + csv::format_real(force));
    };
}

}  // namespace domcx
