#pragma once

// Entropic baseline: per-pixel Shannon entropy of the von Neumann (Manhattan)
// neighbourhood, averaged over the image, plus log2(class count) for the label.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "domcx/dataset.hpp"

namespace domcx {

/// H x W grid of discrete pixel levels, row-major.
struct PixelGrid {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<std::uint16_t> values;

    std::uint16_t at(std::size_t r, std::size_t c) const noexcept { return values[r * width + c]; }
};

/// Mean over pixels of the entropy (bits) of the value histogram of each
/// pixel's neighbourhood {|dr| + |dc| <= radius}, clipped at the image border.
/// Throws InvalidArgument for an empty image or radius 0.
double local_entropy(const PixelGrid& image, std::size_t radius = 1);

/// log2(class_count).
double label_term(std::size_t class_count);

struct EntropyResult {
    std::string domain_name;
    double mean_local_entropy = 0.0;
    double label_term = 0.0;
    double total_per_image = 0.0;
    std::optional<double> normalized;
};

/// Maps [0,1] features to `levels` discrete values: round(v * (levels - 1)),
/// clamped. With 256 levels byte images round-trip exactly.
PixelGrid quantize(std::span<const double> features, std::size_t height, std::size_t width, std::size_t levels);

/// Mean radius-1 local entropy over every image in the dataset, plus the label term.
/// Throws ShapeError when height * width != dims.
EntropyResult dataset_entropy(const TaskDataset& dataset, std::size_t height, std::size_t width,
                              std::size_t levels = 256);

/// Sum-normalises total_per_image across the set.
std::vector<EntropyResult> entropic_predictions(std::vector<EntropyResult> results);

}  // namespace domcx
