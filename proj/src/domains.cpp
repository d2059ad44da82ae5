#include "domcx/domains.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <string>

#include "domcx/error.hpp"
#include "domcx/rng.hpp"

namespace domcx {
namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<std::uint8_t>& bytes, std::size_t offset, const std::filesystem::path& path) {
    if (offset + 4 > bytes.size()) throw FormatError("'" + path.string() + "': truncated IDX header");
    return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
           (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void write_be32(std::ofstream& out, std::uint32_t v) {
    const std::array<char, 4> b{static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
                                static_cast<char>(v)};
    out.write(b.data(), 4);
}

std::string hex32(std::uint32_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s = "0x";
    for (int shift = 28; shift >= 0; shift -= 4) s += digits[(v >> shift) & 0xF];
    return s;
}

std::uint8_t to_byte(double v) noexcept {
    return static_cast<std::uint8_t>(std::clamp(std::lround(v * 255.0), 0L, 255L));
}

}  // namespace

TaskDataset load_idx_images(const std::filesystem::path& image_path, const std::filesystem::path& label_path,
                            std::size_t class_count, double test_fraction, std::uint64_t split_seed) {
    const auto images = read_file(image_path);
    const auto labels = read_file(label_path);

    const std::uint32_t image_magic = read_be32(images, 0, image_path);
    if (image_magic != kIdxImageMagic) {
        throw FormatError("'" + image_path.string() + "': image magic " + hex32(image_magic) + ", expected " +
                          hex32(kIdxImageMagic));
    }
    const std::uint32_t label_magic = read_be32(labels, 0, label_path);
    if (label_magic != kIdxLabelMagic) {
        throw FormatError("'" + label_path.string() + "': label magic " + hex32(label_magic) + ", expected " +
                          hex32(kIdxLabelMagic));
    }
    const std::size_t count = read_be32(images, 4, image_path);
    const std::size_t rows = read_be32(images, 8, image_path);
    const std::size_t cols = read_be32(images, 12, image_path);
    const std::size_t label_count = read_be32(labels, 4, label_path);
    if (count != label_count) {
        throw FormatError("IDX image count " + std::to_string(count) + " does not match label count " +
                          std::to_string(label_count));
    }
    const std::size_t dims = rows * cols;
    if (dims == 0) throw FormatError("'" + image_path.string() + "': zero-sized images");
    if (images.size() != 16 + count * dims) {
        throw FormatError("'" + image_path.string() + "': payload is " + std::to_string(images.size() - 16) +
                          " bytes, header implies " + std::to_string(count * dims));
    }
    if (labels.size() != 8 + count) {
        throw FormatError("'" + label_path.string() + "': payload is " + std::to_string(labels.size() - 8) +
                          " bytes, header implies " + std::to_string(count));
    }
    if (count == 0) throw FormatError("'" + image_path.string() + "' holds no images");

    std::vector<double> features(count * dims);
    for (std::size_t i = 0; i < features.size(); ++i) features[i] = images[16 + i] / 255.0;
    std::vector<int> y(count);
    int max_label = 0;
    for (std::size_t i = 0; i < count; ++i) {
        y[i] = labels[8 + i];
        max_label = std::max(max_label, y[i]);
    }
    if (class_count == 0) class_count = static_cast<std::size_t>(max_label) + 1;
    if (static_cast<std::size_t>(max_label) >= class_count) {
        throw FormatError("'" + label_path.string() + "': label " + std::to_string(max_label) +
                          " exceeds class count " + std::to_string(class_count));
    }
    return TaskDataset::with_random_split(image_path.stem().string(), dims, std::move(features), std::move(y),
                                          class_count, test_fraction, split_seed);
}

void write_idx_images(const TaskDataset& dataset, std::uint32_t rows, std::uint32_t cols,
                      const std::filesystem::path& image_path, const std::filesystem::path& label_path) {
    if (std::size_t{rows} * cols != dataset.dims()) throw ShapeError("rows x cols must equal dataset dims");
    for (int l : dataset.labels()) {
        if (l > 255) throw FormatError("IDX labels are single bytes; label " + std::to_string(l) + " does not fit");
    }
    std::ofstream img(image_path, std::ios::binary);
    std::ofstream lab(label_path, std::ios::binary);
    if (!img || !lab) throw FormatError("cannot open IDX output files");
    write_be32(img, kIdxImageMagic);
    write_be32(img, static_cast<std::uint32_t>(dataset.size()));
    write_be32(img, rows);
    write_be32(img, cols);
    for (double v : dataset.features()) img.put(static_cast<char>(to_byte(v)));
    write_be32(lab, kIdxLabelMagic);
    write_be32(lab, static_cast<std::uint32_t>(dataset.size()));
    for (int l : dataset.labels()) lab.put(static_cast<char>(l));
    if (!img || !lab) throw FormatError("failed writing IDX output files");
}

std::size_t cifar_record_size(CifarVariant variant) noexcept {
    return (variant == CifarVariant::cifar10 ? 1 : 2) + 3 * kCifarPixels;
}

double grayscale(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
    return (0.299 * r + 0.587 * g + 0.114 * b) / 255.0;
}

TaskDataset load_cifar_binary(std::span<const std::filesystem::path> paths, CifarVariant variant,
                              double test_fraction, std::uint64_t split_seed) {
    if (paths.empty()) throw InvalidArgument("no CIFAR files given");
    const std::size_t record = cifar_record_size(variant);
    const std::size_t label_bytes = record - 3 * kCifarPixels;
    const std::size_t classes = variant == CifarVariant::cifar10 ? 10 : 100;

    std::vector<double> features;
    std::vector<int> labels;
    for (const auto& path : paths) {
        const auto bytes = read_file(path);
        if (bytes.empty() || bytes.size() % record != 0) {
            throw FormatError("'" + path.string() + "': length " + std::to_string(bytes.size()) +
                              " is not a multiple of the " + std::to_string(record) + "-byte record");
        }
        for (std::size_t off = 0; off < bytes.size(); off += record) {
            // cifar100 records are (coarse, fine, pixels); the fine label is the 100-way one.
            const int label = bytes[off + label_bytes - 1];
            if (static_cast<std::size_t>(label) >= classes) {
                throw FormatError("'" + path.string() + "': label " + std::to_string(label) + " out of range");
            }
            labels.push_back(label);
            const std::uint8_t* red = bytes.data() + off + label_bytes;
            const std::uint8_t* green = red + kCifarPixels;
            const std::uint8_t* blue = green + kCifarPixels;
            for (std::size_t p = 0; p < kCifarPixels; ++p) features.push_back(grayscale(red[p], green[p], blue[p]));
        }
    }
    return TaskDataset::with_random_split(variant == CifarVariant::cifar10 ? "cifar10" : "cifar100", kCifarPixels,
                                          std::move(features), std::move(labels), classes, test_fraction, split_seed);
}

void ClusterConfig::validate() const {
    if (dims == 0) throw InvalidArgument("clusters: dims must be >= 1");
    if (!(sigma > 0.0)) throw InvalidArgument("clusters: sigma must be > 0");
    if (!(separation >= 0.0)) throw InvalidArgument("clusters: separation must be >= 0");
    if (samples_per_cluster == 0) throw InvalidArgument("clusters: samples_per_cluster must be >= 1");
}

TaskDataset make_clusters(const ClusterConfig& config, double test_fraction) {
    config.validate();
    Rng rng(derive_seed(config.seed, {0xc1u}));
    std::normal_distribution<double> noise(0.0, config.sigma);
    const std::size_t n = 2 * config.samples_per_cluster;
    std::vector<double> features(n * config.dims);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const int cls = i < config.samples_per_cluster ? 0 : 1;
        labels[i] = cls;
        for (std::size_t d = 0; d < config.dims; ++d) {
            const double centre = (cls == 1 && d == 0) ? config.separation : 0.0;
            features[i * config.dims + d] = centre + noise(rng);
        }
    }
    return TaskDataset::with_random_split("clusters", config.dims, std::move(features), std::move(labels), 2,
                                          test_fraction, derive_seed(config.seed, {0x5b1u}));
}

double overlap_coefficient(double separation, double sigma) {
    if (!(sigma > 0.0)) throw InvalidArgument("overlap_coefficient: sigma must be > 0");
    // 2 * Phi(-z) with z = separation / (2 sigma), written via erfc for accuracy in the tail.
    return std::erfc(std::abs(separation) / (2.0 * sigma * std::sqrt(2.0)));
}

void BlobConfig::validate() const {
    if (classes == 0) throw InvalidArgument("blobs: classes must be >= 1");
    if (dims == 0) throw InvalidArgument("blobs: dims must be >= 1");
    if (!(sigma > 0.0)) throw InvalidArgument("blobs: sigma must be > 0");
    if (!(spread >= 0.0)) throw InvalidArgument("blobs: spread must be >= 0");
    if (modes_per_class == 0) throw InvalidArgument("blobs: modes_per_class must be >= 1");
    if (samples_per_class == 0) throw InvalidArgument("blobs: samples_per_class must be >= 1");
}

TaskDataset make_blobs(const BlobConfig& config, double test_fraction) {
    config.validate();
    Rng rng(derive_seed(config.seed, {0xb10bu}));
    std::uniform_real_distribution<double> centre_dist(-config.spread, config.spread);
    const std::size_t modes = config.modes_per_class;
    std::vector<double> centres(config.classes * modes * config.dims);
    for (double& c : centres) c = centre_dist(rng);

    std::normal_distribution<double> noise(0.0, config.sigma);
    const std::size_t n = config.classes * config.samples_per_class;
    std::vector<double> features(n * config.dims);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t cls = i / config.samples_per_class;
        const std::size_t blob = cls * modes + (i % config.samples_per_class) % modes;
        labels[i] = static_cast<int>(cls);
        for (std::size_t d = 0; d < config.dims; ++d) {
            features[i * config.dims + d] = centres[blob * config.dims + d] + noise(rng);
        }
    }
    return TaskDataset::with_random_split("blobs", config.dims, std::move(features), std::move(labels),
                                          config.classes, test_fraction, derive_seed(config.seed, {0x5b1u}));
}

TaskDataset class_subset(const TaskDataset& dataset, std::size_t k, std::uint64_t seed) {
    if (k < 1 || k > dataset.class_count()) {
        throw InvalidArgument("class_subset: k=" + std::to_string(k) + " outside [1, " +
                              std::to_string(dataset.class_count()) + "]");
    }
    std::vector<int> classes(dataset.class_count());
    std::iota(classes.begin(), classes.end(), 0);
    Rng rng(derive_seed(seed, {0x5ab5u}));
    std::shuffle(classes.begin(), classes.end(), rng);
    std::vector<int> relabel(dataset.class_count(), -1);
    for (std::size_t i = 0; i < k; ++i) relabel[static_cast<std::size_t>(classes[i])] = static_cast<int>(i);

    std::vector<std::size_t> new_index(dataset.size(), dataset.size());
    std::vector<double> features;
    std::vector<int> labels;
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        const int mapped = relabel[static_cast<std::size_t>(dataset.label(r))];
        if (mapped < 0) continue;
        new_index[r] = labels.size();
        labels.push_back(mapped);
        const auto row = dataset.row(r);
        features.insert(features.end(), row.begin(), row.end());
    }
    auto remap = [&](std::span<const std::size_t> rows) {
        std::vector<std::size_t> out;
        for (std::size_t r : rows) {
            if (new_index[r] != dataset.size()) out.push_back(new_index[r]);
        }
        return out;
    };
    return TaskDataset(dataset.name() + "_k" + std::to_string(k), dataset.dims(), std::move(features),
                       std::move(labels), k, remap(dataset.train_rows()), remap(dataset.test_rows()));
}

}  // namespace domcx
