#pragma once

// Sources of TaskDataset instances: binary image formats (IDX, CIFAR),
// synthetic Gaussian tasks, the cart-pole control task, and class subsets.

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "domcx/dataset.hpp"

namespace domcx {

// --- image formats --------------------------------------------------------

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

/// IDX image/label pair (MNIST layout). Pixels scaled by 1/255, images
/// flattened row-major. class_count = max label + 1 unless given.
TaskDataset load_idx_images(const std::filesystem::path& image_path, const std::filesystem::path& label_path,
                            std::size_t class_count = 0, double test_fraction = kDefaultTestFraction,
                            std::uint64_t split_seed = 0);

/// Writes a square-image dataset back out as an IDX pair (values re-quantized
/// to bytes). Throws ShapeError if rows x cols != dims.
void write_idx_images(const TaskDataset& dataset, std::uint32_t rows, std::uint32_t cols,
                      const std::filesystem::path& image_path, const std::filesystem::path& label_path);

enum class CifarVariant { cifar10, cifar100 };

inline constexpr std::size_t kCifarPixels = 1024;  // 32 x 32
std::size_t cifar_record_size(CifarVariant variant) noexcept;

/// Concatenated CIFAR binary batches, grayscaled. cifar100 uses the fine label.
TaskDataset load_cifar_binary(std::span<const std::filesystem::path> paths, CifarVariant variant,
                              double test_fraction = kDefaultTestFraction, std::uint64_t split_seed = 0);

/// ITU-R 601 luminance scaled to [0, 1].
double grayscale(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept;

// --- Gaussian tasks -------------------------------------------------------

struct ClusterConfig {
    std::size_t dims = 2;
    double sigma = 1.0;
    double separation = 3.0;
    std::size_t samples_per_cluster = 200;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Two isotropic clusters: class 0 centred at the origin, class 1 at
/// `separation` along the first axis.
TaskDataset make_clusters(const ClusterConfig& config, double test_fraction = kDefaultTestFraction);

/// Overlap coefficient of two equal isotropic normals whose means are
/// `separation` apart: 2 * Phi(-separation / (2 sigma)).
double overlap_coefficient(double separation, double sigma);

struct BlobConfig {
    std::size_t classes = 16;
    std::size_t dims = 2;
    double sigma = 1.0;
    double spread = 4.0;      // mode centres uniform in [-spread, spread]^dims
    std::size_t modes_per_class = 1;
    std::size_t samples_per_class = 100;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Each class is an equal mixture of `modes_per_class` isotropic Gaussian
/// blobs with seeded random centres; sample j of a class uses mode j % modes.
TaskDataset make_blobs(const BlobConfig& config, double test_fraction = kDefaultTestFraction);

// --- subsets --------------------------------------------------------------

/// Keeps the rows of k randomly chosen classes, relabelled 0..k-1 in
/// selection order. Partition membership of kept rows is preserved.
TaskDataset class_subset(const TaskDataset& dataset, std::size_t k, std::uint64_t seed);

// --- cart-pole ------------------------------------------------------------

struct CartpoleState {
    double x = 0.0;
    double x_dot = 0.0;
    double theta = 0.0;
    double theta_dot = 0.0;

    friend bool operator==(const CartpoleState&, const CartpoleState&) = default;
};

struct CartpoleConfig {
    double force_mag = 10.0;
    double gravity = 9.8;
    double cart_mass = 1.0;
    double pole_mass = 0.1;
    double pole_half_length = 0.5;
    double dt = 0.02;
    double angle_limit = 12.0 * 2.0 * 3.14159265358979323846 / 360.0;
    double position_limit = 2.4;
    std::size_t max_steps = 500;
    std::size_t episodes = 10;
    std::uint64_t seed = 0;

    void validate() const;
};

/// One explicit-Euler step of the classic cart-pole equations of motion.
CartpoleState cartpole_step(const CartpoleState& state, double force, const CartpoleConfig& config) noexcept;

CartpoleState mirror(const CartpoleState& state) noexcept;

/// Labelling controller: 1 (push right) iff theta + 0.5 theta_dot + 0.05 x_dot > 0.
int cartpole_controller(const CartpoleState& state) noexcept;

bool cartpole_terminal(const CartpoleState& state, const CartpoleConfig& config) noexcept;

/// Rolls out the controller and records (state, action) pairs; features are
/// min-max normalised per component over the collected set.
TaskDataset cartpole_dataset(const CartpoleConfig& config, double test_fraction = kDefaultTestFraction);

}  // namespace domcx
