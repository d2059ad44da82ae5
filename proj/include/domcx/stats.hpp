#pragma once

#include <span>
#include <vector>

namespace domcx {

/// u.v / (|u| |v|). Throws InvalidArgument on length mismatch and
/// DegenerateInput for a zero vector.
double cosine_similarity(std::span<const double> u, std::span<const double> v);

/// Sample Pearson correlation. Throws DegenerateInput for a constant input or
/// fewer than two points.
double pearson(std::span<const double> x, std::span<const double> y);

/// 1-based ranks, ties receive the average of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

/// Pearson correlation of average ranks.
double spearman(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> values);

/// Sample standard deviation (n - 1); 0 for a single value.
double sample_stddev(std::span<const double> values);

}  // namespace domcx
