#pragma once

#include <cstddef>
#include <vector>

#include "seedsweep/core/dataset.hpp"
#include "seedsweep/core/rng.hpp"
#include "seedsweep/penalized/design.hpp"
#include "seedsweep/penalized/lasso.hpp"

namespace seedsweep::penalized {

struct CvOptions {
    bool one_se_rule = false;  // default: plain minimum of the mean CV error
    PenalizedOptions fit;
};

struct CvCurve {
    LambdaGrid grid;
    std::vector<double> mean_error;               // per lambda
    std::vector<double> se_error;                 // per lambda, sd over folds / sqrt(k)
    std::vector<std::vector<double>> fold_error;  // [fold][lambda] held-out MSE
    double chosen_lambda = 0.0;
    std::size_t chosen_index = 0;
    std::vector<int> fold_labels;
};

/// k-fold CV over the grid. Standardization is recomputed inside every
/// training split; fits are warm-started along the decreasing grid.
CvCurve cv_lasso(const Dataset& d, int k, const LambdaGrid& grid, Rng& rng, const CvOptions& options = {});

CvCurve cv_group_lasso(const Dataset& d, int k, const LambdaGrid& grid, Rng& rng, const CvOptions& options = {});

/// Index of the minimum mean error; ties go to the larger lambda (earlier
/// index). With the 1-SE rule, the largest lambda within one standard error
/// of the minimum.
std::size_t select_lambda(const std::vector<double>& mean_error, const std::vector<double>& se_error,
                          bool one_se_rule);

}  // namespace seedsweep::penalized
