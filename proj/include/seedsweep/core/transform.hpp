#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "seedsweep/core/rng.hpp"

namespace seedsweep {

struct Standardization {
    Eigen::MatrixXd values;
    Eigen::VectorXd means;  // 0 for skipped columns
    Eigen::VectorXd sds;    // 1 for skipped columns
};

/// Centers and scales every non-skipped column to mean 0 and population
/// standard deviation 1. Throws a data error naming the first zero-variance
/// column that is not skipped.
Standardization standardize(const Eigen::MatrixXd& M, const std::vector<bool>& skip);

/// Quantile scores in {0, ..., q-1}. Cut points are the type-7 sample
/// quantiles at j/q; a value equal to a cut point goes to the lower bin.
std::vector<int> quantile_bin(std::span<const double> x, int q);

/// Random fold labels in {0, ..., k-1}: a shuffled index list is dealt
/// round-robin, so fold sizes differ by at most one.
std::vector<int> kfold_assign(std::size_t n, int k, Rng& rng);

}  // namespace seedsweep
