#include "domcx/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>

#include "domcx/csv.hpp"
#include "domcx/error.hpp"
#include "domcx/rng.hpp"

namespace domcx {

TaskDataset::TaskDataset(std::string name, std::size_t dims, std::vector<double> features, std::vector<int> labels,
                         std::size_t class_count, std::vector<std::size_t> train_rows,
                         std::vector<std::size_t> test_rows)
    : name_(std::move(name)),
      dims_(dims),
      features_(std::move(features)),
      labels_(std::move(labels)),
      class_count_(class_count),
      train_rows_(std::move(train_rows)),
      test_rows_(std::move(test_rows)) {
    if (dims_ == 0) throw ShapeError("dataset '" + name_ + "': feature dimension must be >= 1");
    if (class_count_ == 0) throw InvalidArgument("dataset '" + name_ + "': class_count must be >= 1");
    if (features_.size() != labels_.size() * dims_) {
        throw ShapeError("dataset '" + name_ + "': feature matrix is not N x D");
    }
    for (int l : labels_) {
        if (l < 0 || static_cast<std::size_t>(l) >= class_count_) {
            throw InvalidArgument("dataset '" + name_ + "': label " + std::to_string(l) + " outside [0, " +
                                  std::to_string(class_count_) + ")");
        }
    }
    std::vector<char> seen(labels_.size(), 0);
    auto mark = [&](std::span<const std::size_t> rows) {
        for (std::size_t r : rows) {
            if (r >= labels_.size() || seen[r]) {
                throw InvalidArgument("dataset '" + name_ + "': train/test partition overlaps or is out of range");
            }
            seen[r] = 1;
        }
    };
    mark(train_rows_);
    mark(test_rows_);
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
        throw InvalidArgument("dataset '" + name_ + "': train/test partition does not cover every row");
    }
}

TaskDataset TaskDataset::with_random_split(std::string name, std::size_t dims, std::vector<double> features,
                                           std::vector<int> labels, std::size_t class_count, double test_fraction,
                                           std::uint64_t seed) {
    if (!(test_fraction >= 0.0 && test_fraction <= 1.0)) {
        throw InvalidArgument("test_fraction must lie in [0, 1]");
    }
    const std::size_t n = labels.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(derive_seed(seed, {0x5e11UL}));
    std::shuffle(order.begin(), order.end(), rng);

    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
    if (n >= 2 && test_fraction > 0.0 && test_fraction < 1.0) {
        n_test = std::clamp<std::size_t>(n_test, 1, n - 1);
    }
    std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
    std::sort(test.begin(), test.end());
    std::sort(train.begin(), train.end());
    return TaskDataset(std::move(name), dims, std::move(features), std::move(labels), class_count, std::move(train),
                       std::move(test));
}

TaskDataset TaskDataset::from_separate_splits(std::string name, const TaskDataset& train, const TaskDataset& test) {
    if (train.dims() != test.dims()) throw ShapeError("train/test feature dimensions differ");
    std::vector<double> features(train.features_.begin(), train.features_.end());
    features.insert(features.end(), test.features_.begin(), test.features_.end());
    std::vector<int> labels(train.labels_.begin(), train.labels_.end());
    labels.insert(labels.end(), test.labels_.begin(), test.labels_.end());
    std::vector<std::size_t> train_rows(train.size());
    std::iota(train_rows.begin(), train_rows.end(), std::size_t{0});
    std::vector<std::size_t> test_rows(test.size());
    std::iota(test_rows.begin(), test_rows.end(), train.size());
    return TaskDataset(std::move(name), train.dims(), std::move(features), std::move(labels),
                       std::max(train.class_count(), test.class_count()), std::move(train_rows),
                       std::move(test_rows));
}

std::vector<std::size_t> TaskDataset::rows(Partition which) const {
    switch (which) {
        case Partition::train: return train_rows_;
        case Partition::test: return test_rows_;
        case Partition::all: break;
    }
    std::vector<std::size_t> all(size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return all;
}

TaskDataset TaskDataset::renamed(std::string name) const {
    TaskDataset copy = *this;
    copy.name_ = std::move(name);
    return copy;
}

void write_dataset_csv(const TaskDataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open '" + path.string() + "' for writing");
    for (std::size_t j = 0; j < dataset.dims(); ++j) out << "feature_" << j << ',';
    out << "label\n";
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        for (double v : dataset.row(i)) out << csv::format_real(v) << ',';
        out << dataset.label(i) << '\n';
    }
    if (!out) throw FormatError("failed writing '" + path.string() + "'");
}

TaskDataset read_dataset_csv(const std::filesystem::path& path, std::string name, std::size_t class_count,
                             double test_fraction, std::uint64_t split_seed) {
    const auto lines = csv::read_lines(path);
    if (lines.empty()) throw FormatError("'" + path.string() + "' is empty");
    const auto header = csv::split_line(lines.front());
    if (header.size() < 2 || header.back() != "label") {
        throw FormatError("'" + path.string() + "': header must be feature_0..feature_{D-1},label");
    }
    const std::size_t dims = header.size() - 1;
    for (std::size_t j = 0; j < dims; ++j) {
        if (header[j] != "feature_" + std::to_string(j)) {
            throw FormatError("'" + path.string() + "': unexpected header column '" + header[j] + "'");
        }
    }
    std::vector<double> features;
    std::vector<int> labels;
    int max_label = -1;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const auto cells = csv::split_line(lines[li]);
        if (cells.size() != dims + 1) {
            throw FormatError("'" + path.string() + "' line " + std::to_string(li + 1) + ": expected " +
                              std::to_string(dims + 1) + " columns");
        }
        for (std::size_t j = 0; j < dims; ++j) features.push_back(csv::parse_real(cells[j], "feature"));
        const auto label = csv::parse_int(cells[dims], "label");
        if (label < 0) throw FormatError("negative label in '" + path.string() + "'");
        labels.push_back(static_cast<int>(label));
        max_label = std::max(max_label, static_cast<int>(label));
    }
    if (labels.empty()) throw FormatError("'" + path.string() + "' has no data rows");
    if (class_count == 0) class_count = static_cast<std::size_t>(max_label) + 1;
    return TaskDataset::with_random_split(std::move(name), dims, std::move(features), std::move(labels), class_count,
                                          test_fraction, split_seed);
}

}  // namespace domcx
