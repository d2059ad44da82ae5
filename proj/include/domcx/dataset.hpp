#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace domcx {

enum class Partition { train, test, all };

/// A labeled classification domain: N rows of D real features, integer labels
/// in [0, class_count), and a disjoint train/test partition covering every row.
/// Immutable once constructed; the constructor validates all invariants.
class TaskDataset {
public:
    TaskDataset(std::string name, std::size_t dims, std::vector<double> features, std::vector<int> labels,
                std::size_t class_count, std::vector<std::size_t> train_rows, std::vector<std::size_t> test_rows);

    /// Builds a dataset whose test partition is a seeded random `test_fraction`
    /// of the rows (at least one row on each side when N >= 2).
    static TaskDataset with_random_split(std::string name, std::size_t dims, std::vector<double> features,
                                         std::vector<int> labels, std::size_t class_count, double test_fraction,
                                         std::uint64_t seed);

    /// Concatenates a train-only source and a test-only source; rows of `train`
    /// form the train partition, rows of `test` the test partition.
    static TaskDataset from_separate_splits(std::string name, const TaskDataset& train, const TaskDataset& test);

    const std::string& name() const noexcept { return name_; }
    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t dims() const noexcept { return dims_; }
    std::size_t class_count() const noexcept { return class_count_; }

    std::span<const double> row(std::size_t i) const noexcept {
        return {features_.data() + i * dims_, dims_};
    }
    int label(std::size_t i) const noexcept { return labels_[i]; }

    std::span<const double> features() const noexcept { return features_; }
    std::span<const int> labels() const noexcept { return labels_; }
    std::span<const std::size_t> train_rows() const noexcept { return train_rows_; }
    std::span<const std::size_t> test_rows() const noexcept { return test_rows_; }
    std::vector<std::size_t> rows(Partition which) const;

    TaskDataset renamed(std::string name) const;

    friend bool operator==(const TaskDataset&, const TaskDataset&) = default;

private:
    std::string name_;
    std::size_t dims_;
    std::vector<double> features_;
    std::vector<int> labels_;
    std::size_t class_count_;
    std::vector<std::size_t> train_rows_;
    std::vector<std::size_t> test_rows_;
};

inline constexpr double kDefaultTestFraction = 0.2;

/// CSV with header feature_0..feature_{D-1},label. The partition is not stored.
void write_dataset_csv(const TaskDataset& dataset, const std::filesystem::path& path);

/// Reads a dataset CSV; class_count = max label + 1 unless given. The split is
/// regenerated with `with_random_split`.
TaskDataset read_dataset_csv(const std::filesystem::path& path, std::string name, std::size_t class_count = 0,
                             double test_fraction = kDefaultTestFraction, std::uint64_t split_seed = 0);

}  // namespace domcx
