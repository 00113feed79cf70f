#include "seedsweep/core/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seedsweep/core/error.hpp"

namespace seedsweep {

double quantile_sorted(std::span<const double> sorted, double prob) {
    if (sorted.empty()) throw_model("E_MODEL_EMPTY", "quantile of an empty sample");
    if (!(prob >= 0.0 && prob <= 1.0)) throw_usage("E_USAGE_PROB", "quantile probability outside [0,1]");
    const double h = static_cast<double>(sorted.size() - 1) * prob;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    if (frac == 0.0) return sorted[lo];
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double quantile(std::span<const double> values, double prob) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return quantile_sorted(sorted, prob);
}

double median(std::span<const double> values) { return quantile(values, 0.5); }

double mean(std::span<const double> values) {
    if (values.empty()) throw_model("E_MODEL_EMPTY", "mean of an empty sample");
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
    if (values.size() < 2) throw_model("E_MODEL_EMPTY", "variance needs at least two values");
    const double m = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - m) * (v - m);
    return ss / static_cast<double>(values.size() - 1);
}

FiveNumber five_number(std::span<const double> values) {
    if (values.empty()) throw_model("E_MODEL_EMPTY", "summary of an empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return {sorted.front(), quantile_sorted(sorted, 0.25), quantile_sorted(sorted, 0.5),
            quantile_sorted(sorted, 0.75), sorted.back()};
}

}  // namespace seedsweep
