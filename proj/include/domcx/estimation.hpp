#pragma once

// Complexity estimator: least-squares line from capability to score, inverted
// to give the capability needed for each score, integrated over the observed
// positive score range.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "domcx/dataset.hpp"
#include "domcx/population.hpp"

namespace domcx {

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double mse = 0.0;
    std::size_t n = 0;
};

struct ComplexityResult {
    std::string domain_name;
    double raw_auc = 0.0;
    std::optional<double> normalized;  // empty until sum-normalised across a domain set
    double ci_halfwidth = 0.0;
    double v_min = 0.0;
    double v_max = 0.0;
    LinearFit fit;
};

using Point = std::pair<double, double>;

/// Ordinary least squares y = slope * x + intercept. Throws DegenerateInput for
/// fewer than two points or when every x is identical.
LinearFit fit_linear(std::span<const Point> pairs);

/// 1.96 * sqrt(mse / n).
double confidence_halfwidth(const LinearFit& fit) noexcept;

/// Integral over [max(0, v_min), v_max] of max(0, (V - intercept) / slope) dV.
/// Throws DegenerateFit when slope <= 0 and InvalidArgument when v_min > v_max.
double raw_complexity(const LinearFit& fit, double v_min, double v_max);

/// values / sum(values). Throws DegenerateInput if the sum is not positive.
std::vector<double> sum_normalize(std::span<const double> values);

/// raw / (v_max - v_min). Throws DegenerateInput for an empty range.
double range_normalize(double raw, double v_min, double v_max);

/// Fit + AuC + CI over an already-trained population.
ComplexityResult estimate_complexity(std::span<const CapabilityScore> scores, std::string domain_name);

/// Optional narrowing of the integration window; applied after the observed range.
struct ScoreWindow {
    std::optional<double> min;
    std::optional<double> max;
};
ComplexityResult estimate_complexity(std::span<const CapabilityScore> scores, std::string domain_name,
                                     const ScoreWindow& window);

/// sample_population -> run_population -> estimate_complexity.
ComplexityResult measure_complexity(const TaskDataset& domain, const PopulationConfig& config,
                                    CapabilityMeasure measure = CapabilityMeasure::params,
                                    const RunOptions& options = {},
                                    std::vector<CapabilityScore>* scores_out = nullptr);

/// Sets `normalized` on every result by sum-normalising raw_auc.
void normalize_results(std::span<ComplexityResult> results);

}  // namespace domcx
