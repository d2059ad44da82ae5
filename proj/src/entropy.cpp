#include "domcx/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "domcx/error.hpp"
#include "domcx/estimation.hpp"

namespace domcx {
namespace {

struct Offset {
    long dr;
    long dc;
};

std::vector<Offset> diamond(std::size_t radius) {
    const long r = static_cast<long>(radius);
    std::vector<Offset> out;
    for (long dr = -r; dr <= r; ++dr) {
        const long span = r - std::abs(dr);
        for (long dc = -span; dc <= span; ++dc) out.push_back({dr, dc});
    }
    return out;
}

// Entropy of a small multiset, via H = log2(n) - sum(c log2 c) / n.
// `xlogx[c]` caches c * log2(c).
double multiset_entropy(std::span<std::uint16_t> buf, std::span<const double> xlogx) noexcept {
    // insertion sort; localities are tiny
    for (std::size_t i = 1; i < buf.size(); ++i) {
        const std::uint16_t v = buf[i];
        std::size_t j = i;
        for (; j > 0 && buf[j - 1] > v; --j) buf[j] = buf[j - 1];
        buf[j] = v;
    }
    double acc = 0.0;
    std::size_t run = 1;
    for (std::size_t i = 1; i < buf.size(); ++i) {
        if (buf[i] == buf[i - 1]) {
            ++run;
        } else {
            acc += xlogx[run];
            run = 1;
        }
    }
    if (run == buf.size()) return 0.0;
    acc += xlogx[run];
    const double n = static_cast<double>(buf.size());
    return xlogx[buf.size()] / n - acc / n;
}

}  // namespace

double local_entropy(const PixelGrid& image, std::size_t radius) {
    if (image.height == 0 || image.width == 0) throw InvalidArgument("local_entropy: empty image");
    if (image.values.size() != image.height * image.width) throw ShapeError("local_entropy: grid size mismatch");
    if (radius == 0) throw InvalidArgument("local_entropy: radius must be >= 1");

    const auto offsets = diamond(radius);
    std::vector<double> xlogx(offsets.size() + 1, 0.0);
    for (std::size_t c = 2; c < xlogx.size(); ++c) xlogx[c] = static_cast<double>(c) * std::log2(static_cast<double>(c));
    std::vector<std::uint16_t> buf(offsets.size());

    const long h = static_cast<long>(image.height);
    const long w = static_cast<long>(image.width);
    const long r = static_cast<long>(radius);
    double total = 0.0;
    for (long row = 0; row < h; ++row) {
        const bool row_interior = row >= r && row + r < h;
        for (long col = 0; col < w; ++col) {
            std::size_t n = 0;
            if (row_interior && col >= r && col + r < w) {
                const std::uint16_t* centre = image.values.data() + row * w + col;
                for (const auto& o : offsets) buf[n++] = centre[o.dr * w + o.dc];
            } else {
                for (const auto& o : offsets) {
                    const long rr = row + o.dr;
                    const long cc = col + o.dc;
                    if (rr >= 0 && rr < h && cc >= 0 && cc < w) buf[n++] = image.values[rr * w + cc];
                }
            }
            total += multiset_entropy(std::span(buf.data(), n), xlogx);
        }
    }
    return total / static_cast<double>(h * w);
}

double label_term(std::size_t class_count) {
    if (class_count == 0) throw InvalidArgument("label_term: class_count must be >= 1");
    return std::log2(static_cast<double>(class_count));
}

PixelGrid quantize(std::span<const double> features, std::size_t height, std::size_t width, std::size_t levels) {
    if (features.size() != height * width) {
        throw ShapeError("quantize: " + std::to_string(features.size()) + " features cannot form a " +
                         std::to_string(height) + "x" + std::to_string(width) + " image");
    }
    if (levels < 2 || levels > 65536) throw InvalidArgument("quantize: levels must lie in [2, 65536]");
    PixelGrid grid{height, width, std::vector<std::uint16_t>(features.size())};
    const double top = static_cast<double>(levels - 1);
    for (std::size_t i = 0; i < features.size(); ++i) {
        const double q = std::round(std::clamp(features[i], 0.0, 1.0) * top);
        grid.values[i] = static_cast<std::uint16_t>(q);
    }
    return grid;
}

EntropyResult dataset_entropy(const TaskDataset& dataset, std::size_t height, std::size_t width, std::size_t levels) {
    if (height * width != dataset.dims()) {
        throw ShapeError("dataset '" + dataset.name() + "' has " + std::to_string(dataset.dims()) +
                         " features, not " + std::to_string(height) + "x" + std::to_string(width));
    }
    std::vector<double> per_image(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        per_image[i] = local_entropy(quantize(dataset.row(i), height, width, levels), 1);
    }
    // Summing in sorted order makes the mean independent of row order.
    std::sort(per_image.begin(), per_image.end());
    double total = 0.0;
    for (double v : per_image) total += v;

    EntropyResult result;
    result.domain_name = dataset.name();
    result.mean_local_entropy = total / static_cast<double>(dataset.size());
    result.label_term = label_term(dataset.class_count());
    result.total_per_image = result.mean_local_entropy + result.label_term;
    return result;
}

std::vector<EntropyResult> entropic_predictions(std::vector<EntropyResult> results) {
    if (results.empty()) throw InvalidArgument("entropic_predictions: no datasets");
    std::vector<double> totals;
    totals.reserve(results.size());
    for (const auto& r : results) totals.push_back(r.total_per_image);
    const auto norm = sum_normalize(totals);
    for (std::size_t i = 0; i < results.size(); ++i) results[i].normalized = norm[i];
    return results;
}

}  // namespace domcx
