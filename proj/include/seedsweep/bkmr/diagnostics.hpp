#pragma once

#include <span>
#include <vector>

namespace seedsweep::bkmr {

/**
 * Classic Gelman-Rubin potential scale reduction for m >= 2 chains of equal
 * length n >= 2:  R = sqrt(((n - 1) / n * W + B / n) / W), with W the mean
 * within-chain variance and B = n * var(chain means).
 *
 * Returns 1.0 when W = 0 and B = 0; throws when W = 0 and B > 0.
 */
double gelman_rubin(std::span<const std::vector<double>> chains);

/// Monte Carlo standard error of the sample mean by non-overlapping batch
/// means with floor(sqrt(n)) batches.
double batch_means_se(std::span<const double> draws);

}  // namespace seedsweep::bkmr
