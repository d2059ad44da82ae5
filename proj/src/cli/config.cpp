#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <string>

#include "domcx/cli.hpp"
#include "domcx/domains.hpp"
#include "domcx/error.hpp"
#include "domcx/kernels.hpp"
#include "domcx/rng.hpp"

namespace domcx::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kDomainTag = 0xd0;
constexpr std::uint64_t kSplitTag = 0xd1;
constexpr std::uint64_t kSourceTag = 0xd2;
constexpr std::uint64_t kSweepTag = 0xd3;
constexpr std::uint64_t kClusterTag = 0xd4;

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw InvalidArgument(where + ": expected a JSON object");
    for (const auto& [key, value] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
            throw InvalidArgument(where + ": unknown key '" + key + "'");
        }
    }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw InvalidArgument(where + ": key '" + key + "' has the wrong type");
    }
}

template <typename T>
T require(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw InvalidArgument(where + ": missing key '" + key + "'");
    return get_or<T>(obj, key, T{}, where);
}

IntRange parse_range(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2) throw InvalidArgument(where + ": expected [min, max]");
    try {
        return {v[0].get<std::size_t>(), v[1].get<std::size_t>()};
    } catch (const json::exception&) {
        throw InvalidArgument(where + ": range bounds must be non-negative integers");
    }
}

std::string absolute_path(const json& v, const fs::path& base, const std::string& where) {
    if (!v.is_string()) throw InvalidArgument(where + ": path must be a string");
    fs::path p = v.get<std::string>();
    if (p.is_relative() && !base.empty()) p = base / p;
    return p.lexically_normal().string();
}

ClusterConfig cluster_config(const json& s, const std::string& where) {
    ClusterConfig c;
    c.dims = get_or(s, "dims", c.dims, where);
    c.sigma = get_or(s, "sigma", c.sigma, where);
    c.separation = get_or(s, "separation", c.separation, where);
    c.samples_per_cluster = get_or(s, "samples_per_cluster", c.samples_per_cluster, where);
    c.seed = get_or(s, "seed", c.seed, where);
    c.validate();
    return c;
}

BlobConfig blob_config(const json& s, const std::string& where) {
    BlobConfig b;
    b.classes = get_or(s, "classes", b.classes, where);
    b.dims = get_or(s, "dims", b.dims, where);
    b.sigma = get_or(s, "sigma", b.sigma, where);
    b.spread = get_or(s, "spread", b.spread, where);
    b.modes_per_class = get_or(s, "modes_per_class", b.modes_per_class, where);
    b.samples_per_class = get_or(s, "samples_per_class", b.samples_per_class, where);
    b.seed = get_or(s, "seed", b.seed, where);
    b.validate();
    return b;
}

CartpoleConfig cartpole_config(const json& s, const std::string& where) {
    CartpoleConfig c;
    c.force_mag = get_or(s, "force_mag", c.force_mag, where);
    c.gravity = get_or(s, "gravity", c.gravity, where);
    c.cart_mass = get_or(s, "cart_mass", c.cart_mass, where);
    c.pole_mass = get_or(s, "pole_mass", c.pole_mass, where);
    c.pole_half_length = get_or(s, "pole_half_length", c.pole_half_length, where);
    c.dt = get_or(s, "dt", c.dt, where);
    c.angle_limit = get_or(s, "angle_limit", c.angle_limit, where);
    c.position_limit = get_or(s, "position_limit", c.position_limit, where);
    c.max_steps = get_or(s, "max_steps", c.max_steps, where);
    c.episodes = get_or(s, "episodes", c.episodes, where);
    c.seed = get_or(s, "seed", c.seed, where);
    c.validate();
    return c;
}

#define DOMCX_COMMON_KEYS "type", "name", "test_fraction", "split_seed", "height", "width", "levels"

void check_domain_keys(const json& s, const std::string& type, const std::string& where) {
    if (type == "clusters") {
        check_keys(s, {DOMCX_COMMON_KEYS, "dims", "sigma", "separation", "samples_per_cluster", "seed"}, where);
    } else if (type == "blobs") {
        check_keys(s, {DOMCX_COMMON_KEYS, "classes", "dims", "sigma", "spread", "modes_per_class",
                       "samples_per_class", "seed"},
                   where);
    } else if (type == "cartpole") {
        check_keys(s, {DOMCX_COMMON_KEYS, "force_mag", "gravity", "cart_mass", "pole_mass", "pole_half_length", "dt",
                       "angle_limit", "position_limit", "max_steps", "episodes", "seed"},
                   where);
    } else if (type == "idx") {
        check_keys(s, {DOMCX_COMMON_KEYS, "images", "labels", "test_images", "test_labels", "class_count"}, where);
    } else if (type == "cifar") {
        check_keys(s, {DOMCX_COMMON_KEYS, "variant", "files", "test_files"}, where);
    } else if (type == "csv") {
        check_keys(s, {DOMCX_COMMON_KEYS, "path", "class_count"}, where);
    } else {
        throw InvalidArgument(where + ": unknown domain type '" + type +
                              "' (clusters|blobs|cartpole|idx|cifar|csv)");
    }
}

#undef DOMCX_COMMON_KEYS

// Validates a domain spec, makes its paths absolute and fills every default.
json normalize_domain(json s, const fs::path& base, std::uint64_t generator_seed, std::uint64_t split_seed,
                      double test_fraction, const std::string& default_name, const std::string& where) {
    if (!s.is_object()) throw InvalidArgument(where + ": expected a JSON object");
    const auto type = require<std::string>(s, "type", where);
    check_domain_keys(s, type, where);
    if (!s.contains("name")) s["name"] = default_name;
    if (!s.contains("test_fraction")) s["test_fraction"] = test_fraction;
    if (!s.contains("split_seed")) s["split_seed"] = split_seed;

    if (type == "clusters" || type == "blobs" || type == "cartpole") {
        if (!s.contains("seed")) s["seed"] = generator_seed;
    }
    if (type == "clusters") {
        const auto c = cluster_config(s, where);
        s["dims"] = c.dims;
        s["sigma"] = c.sigma;
        s["separation"] = c.separation;
        s["samples_per_cluster"] = c.samples_per_cluster;
    } else if (type == "blobs") {
        const auto b = blob_config(s, where);
        s["classes"] = b.classes;
        s["dims"] = b.dims;
        s["sigma"] = b.sigma;
        s["spread"] = b.spread;
        s["modes_per_class"] = b.modes_per_class;
        s["samples_per_class"] = b.samples_per_class;
    } else if (type == "cartpole") {
        const auto c = cartpole_config(s, where);
        s["force_mag"] = c.force_mag;
        s["gravity"] = c.gravity;
        s["cart_mass"] = c.cart_mass;
        s["pole_mass"] = c.pole_mass;
        s["pole_half_length"] = c.pole_half_length;
        s["dt"] = c.dt;
        s["angle_limit"] = c.angle_limit;
        s["position_limit"] = c.position_limit;
        s["max_steps"] = c.max_steps;
        s["episodes"] = c.episodes;
    } else if (type == "idx") {
        for (const char* key : {"images", "labels", "test_images", "test_labels"}) {
            if (s.contains(key)) s[key] = absolute_path(s[key], base, where);
        }
        require<std::string>(s, "images", where);
        require<std::string>(s, "labels", where);
        if (s.contains("test_images") != s.contains("test_labels")) {
            throw InvalidArgument(where + ": test_images and test_labels go together");
        }
    } else if (type == "cifar") {
        const auto variant = get_or<std::string>(s, "variant", "cifar10", where);
        if (variant != "cifar10" && variant != "cifar100") {
            throw InvalidArgument(where + ": variant must be cifar10 or cifar100");
        }
        s["variant"] = variant;
        for (const char* key : {"files", "test_files"}) {
            if (!s.contains(key)) continue;
            if (!s[key].is_array()) throw InvalidArgument(where + ": '" + key + "' must be an array of paths");
            for (auto& p : s[key]) p = absolute_path(p, base, where);
        }
        if (!s.contains("files") || s["files"].empty()) throw InvalidArgument(where + ": 'files' is required");
    } else if (type == "csv") {
        s["path"] = absolute_path(require<std::string>(s, "path", where), base, where);
    }
    return s;
}

std::vector<fs::path> path_list(const json& arr) {
    std::vector<fs::path> out;
    for (const auto& p : arr) out.emplace_back(p.get<std::string>());
    return out;
}

std::uint32_t be32(const unsigned char* p) {
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

}  // namespace

RunConfig parse_run_config(const json& doc, const fs::path& base_dir) {
    const std::string where = "config";
    check_keys(doc, {"seed", "test_fraction", "kernels", "capability_measure", "population", "protocol", "domains",
                     "clusters", "separations", "source", "class_counts", "repeats", "capability_threshold", "sweep"},
               where);
    RunConfig c;
    c.seed = get_or(doc, "seed", c.seed, where);
    c.test_fraction = get_or(doc, "test_fraction", c.test_fraction, where);
    if (!(c.test_fraction >= 0.0 && c.test_fraction <= 1.0)) throw InvalidArgument("config: test_fraction not in [0, 1]");
    c.kernels = get_or(doc, "kernels", c.kernels, where);
    kernels::parse_backend(c.kernels);
    c.measure = parse_capability_measure(get_or<std::string>(doc, "capability_measure", "params", where));

    if (doc.contains("population")) {
        const auto& p = doc["population"];
        check_keys(p, {"size", "hidden_layers", "nodes_per_layer"}, "config.population");
        c.population.population_size = get_or(p, "size", c.population.population_size, "config.population");
        if (p.contains("hidden_layers")) c.population.hidden_layers = parse_range(p["hidden_layers"], "hidden_layers");
        if (p.contains("nodes_per_layer")) {
            c.population.nodes_per_layer = parse_range(p["nodes_per_layer"], "nodes_per_layer");
        }
    }
    if (doc.contains("protocol")) {
        const auto& p = doc["protocol"];
        const std::string pw = "config.protocol";
        check_keys(p, {"epochs", "learning_rate", "batch_size", "shuffle_seed"}, pw);
        auto& t = c.population.protocol;
        t.epochs = get_or(p, "epochs", t.epochs, pw);
        t.learning_rate = get_or(p, "learning_rate", t.learning_rate, pw);
        t.batch_size = get_or(p, "batch_size", t.batch_size, pw);
        t.shuffle_seed = get_or(p, "shuffle_seed", t.shuffle_seed, pw);
    }

    if (doc.contains("domains")) {
        if (!doc["domains"].is_array()) throw InvalidArgument("config: 'domains' must be an array");
        c.domains = doc["domains"];
    }
    // Paths are made absolute immediately so later resolution does not need base_dir.
    for (std::size_t i = 0; i < c.domains.size(); ++i) {
        c.domains[i] = normalize_domain(c.domains[i], base_dir, 0, 0, c.test_fraction, "domain_" + std::to_string(i),
                                        "config.domains[" + std::to_string(i) + "]");
        for (const char* key : {"seed", "split_seed"}) {
            if (!doc["domains"][i].contains(key)) c.domains[i].erase(key);
        }
    }

    if (doc.contains("clusters")) {
        c.clusters = doc["clusters"];
        check_keys(c.clusters, {"dims", "sigma", "samples_per_cluster", "seed", "test_fraction"}, "config.clusters");
        cluster_config(c.clusters, "config.clusters");
    }
    c.separations = get_or(doc, "separations", c.separations, where);
    if (doc.contains("source")) {
        c.source = normalize_domain(doc["source"], base_dir, 0, 0, c.test_fraction, "source", "config.source");
        for (const char* key : {"seed", "split_seed"}) {
            if (!doc["source"].contains(key)) c.source.erase(key);
        }
    }
    c.class_counts = get_or(doc, "class_counts", c.class_counts, where);
    c.repeats = get_or(doc, "repeats", c.repeats, where);
    c.capability_threshold = get_or(doc, "capability_threshold", c.capability_threshold, where);
    if (doc.contains("sweep")) {
        const auto& s = doc["sweep"];
        check_keys(s, {"domain", "parameter", "values", "range"}, "config.sweep");
        c.sweep = s;
        const auto original = s.contains("domain") ? s["domain"] : json();
        c.sweep["domain"] = normalize_domain(original, base_dir, 0, 0, c.test_fraction, "sweep", "config.sweep.domain");
        for (const char* key : {"seed", "split_seed"}) {
            if (!original.contains(key)) c.sweep["domain"].erase(key);
        }
        require<std::string>(s, "parameter", "config.sweep");
        sweep_values(s);
    }
    return c;
}

RunConfig load_run_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open config '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw FormatError("config '" + path.string() + "' is not valid JSON: " + e.what());
    }
    return parse_run_config(doc, fs::absolute(path).parent_path());
}

void resolve(RunConfig& c) {
    c.population.master_seed = c.seed;
    c.population.validate();
    c.population.protocol.validate();
    for (std::size_t i = 0; i < c.domains.size(); ++i) {
        c.domains[i] = normalize_domain(c.domains[i], {}, derive_seed(c.seed, {kDomainTag, i}),
                                        derive_seed(c.seed, {kSplitTag, i}), c.test_fraction,
                                        "domain_" + std::to_string(i), "domains[" + std::to_string(i) + "]");
    }
    if (!c.source.empty()) {
        c.source = normalize_domain(c.source, {}, derive_seed(c.seed, {kSourceTag}),
                                    derive_seed(c.seed, {kSplitTag, kSourceTag}), c.test_fraction, "source", "source");
    }
    if (!c.sweep.empty()) {
        c.sweep["domain"] = normalize_domain(c.sweep["domain"], {}, derive_seed(c.seed, {kSweepTag}),
                                             derive_seed(c.seed, {kSplitTag, kSweepTag}), c.test_fraction, "sweep",
                                             "sweep.domain");
        c.sweep["values"] = sweep_values(c.sweep);
        c.sweep.erase("range");
    }
    if (!c.clusters.empty() || !c.separations.empty()) {
        ClusterConfig cc = cluster_config(c.clusters, "clusters");
        if (!c.clusters.contains("seed")) cc.seed = derive_seed(c.seed, {kClusterTag});
        c.clusters = json{{"dims", cc.dims},
                          {"sigma", cc.sigma},
                          {"samples_per_cluster", cc.samples_per_cluster},
                          {"seed", cc.seed},
                          {"test_fraction", get_or(c.clusters, "test_fraction", c.test_fraction, "clusters")}};
    }
}

json to_json(const RunConfig& c) {
    const auto& t = c.population.protocol;
    json doc{
        {"seed", c.seed},
        {"test_fraction", c.test_fraction},
        {"kernels", c.kernels},
        {"capability_measure", capability_measure_name(c.measure)},
        {"population",
         {{"size", c.population.population_size},
          {"hidden_layers", {c.population.hidden_layers.min, c.population.hidden_layers.max}},
          {"nodes_per_layer", {c.population.nodes_per_layer.min, c.population.nodes_per_layer.max}}}},
        {"protocol",
         {{"epochs", t.epochs},
          {"learning_rate", t.learning_rate},
          {"batch_size", t.batch_size},
          {"shuffle_seed", t.shuffle_seed}}},
        {"domains", c.domains},
    };
    if (!c.clusters.empty()) doc["clusters"] = c.clusters;
    if (!c.separations.empty()) doc["separations"] = c.separations;
    if (!c.source.empty()) doc["source"] = c.source;
    if (!c.class_counts.empty()) doc["class_counts"] = c.class_counts;
    if (!c.source.empty() || !c.class_counts.empty()) doc["repeats"] = c.repeats;
    doc["capability_threshold"] = c.capability_threshold;
    if (!c.sweep.empty()) doc["sweep"] = c.sweep;
    return doc;
}

TaskDataset build_domain(const json& s) {
    const auto type = s.at("type").get<std::string>();
    const auto name = s.at("name").get<std::string>();
    const double tf = s.at("test_fraction").get<double>();
    const auto split_seed = s.at("split_seed").get<std::uint64_t>();
    const std::string where = "domain '" + name + "'";
    TaskDataset d = [&]() -> TaskDataset {
        if (type == "clusters") return make_clusters(cluster_config(s, where), tf);
        if (type == "blobs") return make_blobs(blob_config(s, where), tf);
        if (type == "cartpole") return cartpole_dataset(cartpole_config(s, where), tf);
        if (type == "idx") {
            const auto classes = get_or<std::size_t>(s, "class_count", 0, where);
            const fs::path img = s.at("images").get<std::string>();
            const fs::path lab = s.at("labels").get<std::string>();
            if (s.contains("test_images")) {
                const auto train = load_idx_images(img, lab, classes, 0.0, split_seed);
                const auto test = load_idx_images(s.at("test_images").get<std::string>(),
                                                  s.at("test_labels").get<std::string>(), classes, 1.0, split_seed);
                return TaskDataset::from_separate_splits(name, train, test);
            }
            return load_idx_images(img, lab, classes, tf, split_seed);
        }
        if (type == "cifar") {
            const auto variant =
                s.at("variant").get<std::string>() == "cifar100" ? CifarVariant::cifar100 : CifarVariant::cifar10;
            const auto files = path_list(s.at("files"));
            if (s.contains("test_files")) {
                const auto train = load_cifar_binary(files, variant, 0.0, split_seed);
                const auto test = load_cifar_binary(path_list(s.at("test_files")), variant, 1.0, split_seed);
                return TaskDataset::from_separate_splits(name, train, test);
            }
            return load_cifar_binary(files, variant, tf, split_seed);
        }
        if (type == "csv") {
            return read_dataset_csv(s.at("path").get<std::string>(), name,
                                    get_or<std::size_t>(s, "class_count", 0, where), tf, split_seed);
        }
        throw InvalidArgument(where + ": unknown domain type '" + type + "'");
    }();
    return d.renamed(name);
}

ImageShape image_shape(const json& s) {
    ImageShape shape;
    shape.levels = get_or<std::size_t>(s, "levels", 256, "domain");
    if (s.contains("height") || s.contains("width")) {
        shape.height = get_or<std::size_t>(s, "height", 0, "domain");
        shape.width = get_or<std::size_t>(s, "width", 0, "domain");
        return shape;
    }
    const auto type = s.at("type").get<std::string>();
    if (type == "cifar") {
        shape.height = 32;
        shape.width = 32;
        return shape;
    }
    if (type == "idx") {
        const fs::path img = s.at("images").get<std::string>();
        std::ifstream in(img, std::ios::binary);
        unsigned char header[16];
        if (!in.read(reinterpret_cast<char*>(header), 16)) {
            throw FormatError("'" + img.string() + "': truncated IDX header");
        }
        shape.height = be32(header + 8);
        shape.width = be32(header + 12);
        return shape;
    }
    throw InvalidArgument("domain '" + s.value("name", type) + "' needs explicit height and width for entropy");
}

std::vector<double> sweep_values(const json& sweep) {
    const bool has_values = sweep.contains("values");
    const bool has_range = sweep.contains("range");
    if (has_values == has_range) throw InvalidArgument("sweep: give exactly one of 'values' or 'range'");
    std::vector<double> out;
    if (has_values) {
        out = get_or<std::vector<double>>(sweep, "values", {}, "sweep");
    } else {
        const auto r = get_or<std::vector<double>>(sweep, "range", {}, "sweep");
        if (r.size() != 3 || !(r[2] > 0.0) || r[1] < r[0]) {
            throw InvalidArgument("sweep: range must be [start, stop, step] with step > 0 and stop >= start");
        }
        const auto n = static_cast<std::size_t>(std::floor((r[1] - r[0]) / r[2] + 1e-9)) + 1;
        for (std::size_t i = 0; i < n; ++i) out.push_back(r[0] + static_cast<double>(i) * r[2]);
    }
    if (out.empty()) throw InvalidArgument("sweep: no values");
    return out;
}

}  // namespace domcx::cli
