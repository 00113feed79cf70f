#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "seedsweep/bkmr/mcmc.hpp"
#include "seedsweep/core/dataset.hpp"

namespace seedsweep::bkmr {

struct PipTable {
    std::vector<double> group_pips;        // per group, dataset order
    std::vector<double> conditional_pips;  // per exposure, dataset order
    std::vector<bool> group_never_active;  // conditional PIPs of these groups are reported as 0
};

/// Group PIPs and within-group conditional PIPs, pooled over all traces.
PipTable compute_pips(std::span<const McmcTrace> traces, const GroupSpec& groups);

struct ExposureResponse {
    std::size_t exposure = 0;
    std::vector<double> grid;
    std::vector<double> mean;
    std::vector<double> lower;  // 2.5% pointwise
    std::vector<double> upper;  // 97.5% pointwise
};

struct MixtureEffect {
    double percentile = 0.0;
    double mean = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

/**
 * Posterior mean of h at arbitrary exposure profiles, one row per thinned
 * posterior state. For each state the solve V^-1 (y - X beta) is done once
 * up front, so queries cost one cross-kernel product per state.
 */
class HPredictor {
public:
    HPredictor(const Dataset& d, std::span<const McmcTrace> traces, const BkmrConfig& cfg);

    /// Rows of `Zq` are exposure profiles on the original scale. Returns a
    /// states x queries matrix.
    Eigen::MatrixXd draws(const Eigen::MatrixXd& Zq) const;

    std::size_t state_count() const { return alpha_.size(); }

private:
    Eigen::MatrixXd z_;  // standardized training exposures
    Eigen::VectorXd means_;
    Eigen::VectorXd sds_;
    std::vector<Eigen::VectorXd> alpha_;  // lam * V^-1 (y - X beta)
    std::vector<Eigen::VectorXd> r_;
};

/// Curve for exposure m over grid_points values spanning its 5th to 95th
/// sample percentiles, other exposures held at their medians.
ExposureResponse univariate_hresponse(const HPredictor& predictor, const Dataset& d, std::size_t m, int grid_points);
ExposureResponse univariate_hresponse(std::span<const McmcTrace> traces, const Dataset& d, std::size_t m,
                                      const BkmrConfig& cfg);

/// h(all exposures at percentile pi) - h(all exposures at their medians).
std::vector<MixtureEffect> overall_mixture_effect(const HPredictor& predictor, const Dataset& d,
                                                  std::span<const double> percentiles);
std::vector<MixtureEffect> overall_mixture_effect(std::span<const McmcTrace> traces, const Dataset& d,
                                                  std::span<const double> percentiles, const BkmrConfig& cfg);

}  // namespace seedsweep::bkmr
