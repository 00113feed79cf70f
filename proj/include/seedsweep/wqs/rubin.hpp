#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <utility>

namespace seedsweep::wqs {

struct PooledEstimate {
    double estimate = 0.0;
    double within_var = 0.0;
    double between_var = 0.0;
    double total_var = 0.0;
    double df = 0.0;  // may be +inf
    std::pair<double, double> ci95{0.0, 0.0};
    std::size_t m = 0;

    bool operator==(const PooledEstimate&) const = default;
};

/// Rubin's rules across m repeated analyses. Degrees of freedom use the
/// Barnard-Rubin small-sample adjustment with `complete_df` residual degrees
/// of freedom per analysis (infinite gives the classic large-sample df).
PooledEstimate rubins_pool(std::span<const double> estimates, std::span<const double> variances,
                           double complete_df = std::numeric_limits<double>::infinity());

/// Two-sided 97.5% quantile of Student's t; the normal quantile when df is infinite.
double t_quantile_975(double df);

}  // namespace seedsweep::wqs
