#include "domcx/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "domcx/error.hpp"

namespace domcx {

LinearFit fit_linear(std::span<const Point> pairs) {
    const std::size_t n = pairs.size();
    if (n < 2) throw DegenerateInput("fit_linear needs at least two points");
    const bool all_same_x = std::all_of(pairs.begin(), pairs.end(),
                                        [&](const Point& p) { return p.first == pairs.front().first; });
    if (all_same_x) throw DegenerateInput("fit_linear: every x is identical");

    const double inv_n = 1.0 / static_cast<double>(n);
    double x_mean = 0.0;
    double y_mean = 0.0;
    for (const auto& [x, y] : pairs) {
        x_mean += x;
        y_mean += y;
    }
    x_mean *= inv_n;
    y_mean *= inv_n;

    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& [x, y] : pairs) {
        sxx += (x - x_mean) * (x - x_mean);
        sxy += (x - x_mean) * (y - y_mean);
    }
    LinearFit fit;
    fit.n = n;
    fit.slope = sxy / sxx;
    fit.intercept = y_mean - fit.slope * x_mean;
    double sse = 0.0;
    for (const auto& [x, y] : pairs) {
        const double r = y - (fit.slope * x + fit.intercept);
        sse += r * r;
    }
    fit.mse = sse * inv_n;
    return fit;
}

double confidence_halfwidth(const LinearFit& fit) noexcept {
    if (fit.n == 0) return 0.0;
    return 1.96 * std::sqrt(fit.mse / static_cast<double>(fit.n));
}

double raw_complexity(const LinearFit& fit, double v_min, double v_max) {
    if (!(fit.slope > 0.0)) {
        throw DegenerateFit("score does not increase with capability (slope " + std::to_string(fit.slope) +
                            "); complexity is undefined for this population");
    }
    if (v_min > v_max) throw InvalidArgument("raw_complexity: v_min > v_max");
    const double hi = v_max;
    // Inverted capability is clamped at zero below the intercept.
    const double lo = std::max({0.0, v_min, fit.intercept});
    if (hi <= lo) return 0.0;
    return (hi - lo) * ((hi - fit.intercept) + (lo - fit.intercept)) / (2.0 * fit.slope);
}

std::vector<double> sum_normalize(std::span<const double> values) {
    double total = 0.0;
    for (double v : values) {
        if (v < 0.0 || !std::isfinite(v)) throw InvalidArgument("sum_normalize: values must be finite and >= 0");
        total += v;
    }
    if (!(total > 0.0)) throw DegenerateInput("sum_normalize: values sum to zero");
    std::vector<double> out(values.begin(), values.end());
    for (double& v : out) v /= total;
    return out;
}

double range_normalize(double raw, double v_min, double v_max) {
    if (!(v_max > v_min)) throw DegenerateInput("range_normalize: empty score range");
    return raw / (v_max - v_min);
}

ComplexityResult estimate_complexity(std::span<const CapabilityScore> scores, std::string domain_name) {
    return estimate_complexity(scores, std::move(domain_name), ScoreWindow{});
}

ComplexityResult estimate_complexity(std::span<const CapabilityScore> scores, std::string domain_name,
                                     const ScoreWindow& window) {
    std::vector<Point> pairs;
    pairs.reserve(scores.size());
    for (const auto& s : scores) pairs.emplace_back(s.capability, s.score);
    ComplexityResult result;
    result.domain_name = std::move(domain_name);
    result.fit = fit_linear(pairs);

    double lo = scores.front().score;
    double hi = lo;
    for (const auto& s : scores) {
        lo = std::min(lo, s.score);
        hi = std::max(hi, s.score);
    }
    result.v_min = std::max(0.0, lo);
    result.v_max = hi;
    if (window.min) result.v_min = std::max(result.v_min, *window.min);
    if (window.max) result.v_max = std::min(result.v_max, *window.max);

    result.raw_auc = raw_complexity(result.fit, result.v_min, result.v_max);
    result.ci_halfwidth = confidence_halfwidth(result.fit);
    return result;
}

ComplexityResult measure_complexity(const TaskDataset& domain, const PopulationConfig& config,
                                    CapabilityMeasure measure, const RunOptions& options,
                                    std::vector<CapabilityScore>* scores_out) {
    const auto population = sample_population(config);
    auto scores = run_population(population, domain, config.protocol, measure, options);
    ComplexityResult result = estimate_complexity(scores, domain.name());
    if (scores_out != nullptr) *scores_out = std::move(scores);
    return result;
}

void normalize_results(std::span<ComplexityResult> results) {
    std::vector<double> raw;
    raw.reserve(results.size());
    for (const auto& r : results) raw.push_back(r.raw_auc);
    const auto norm = sum_normalize(raw);
    for (std::size_t i = 0; i < results.size(); ++i) results[i].normalized = norm[i];
}

}  // namespace domcx
