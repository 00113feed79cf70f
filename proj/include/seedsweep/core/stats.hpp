#pragma once

#include <span>
#include <vector>

namespace seedsweep {

/// Type-7 (linear interpolation) sample quantile of already sorted data.
double quantile_sorted(std::span<const double> sorted, double prob);

/// Type-7 sample quantile; copies and sorts.
double quantile(std::span<const double> values, double prob);

double median(std::span<const double> values);
double mean(std::span<const double> values);

/// Sample variance with denominator n - 1.
double sample_variance(std::span<const double> values);

struct FiveNumber {
    double min = 0.0;
    double iqr_low = 0.0;
    double median = 0.0;
    double iqr_high = 0.0;
    double max = 0.0;

    bool operator==(const FiveNumber&) const = default;
};

/// min / 25% / 50% / 75% / max with type-7 quartiles.
FiveNumber five_number(std::span<const double> values);

}  // namespace seedsweep
