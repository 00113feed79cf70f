#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "seedsweep/core/dataset.hpp"
#include "seedsweep/penalized/design.hpp"

namespace seedsweep::penalized {

/// sign(z) * max(|z| - gamma, 0)
inline double soft_threshold(double z, double gamma) {
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

/// Candidate penalties, log-spaced and strictly decreasing from lambda_max
/// down to lambda_max * ratio.
struct LambdaGrid {
    std::vector<double> values;
    double lambda_max = 0.0;
    double ratio = 1e-4;
    std::size_t count = 0;
};

LambdaGrid make_lambda_grid(double lambda_max, std::size_t count = 100, double ratio = 1e-4);

struct LassoFit {
    Eigen::VectorXd beta;  // over [Z | X], original scale; intercept column holds the intercept
    double intercept = 0.0;
    double lambda = 0.0;
    int n_iterations = 0;
    bool converged = false;
    std::vector<std::string> warnings;
};

/// Smallest penalty at which every penalized coefficient is zero, on the
/// standardized scale used by lasso_fit.
double lambda_max(const Dataset& d, const PenalizedOptions& options = {});

/// Cyclic coordinate descent for
///   (1/2n)||y - X b||² + lambda * sum_{penalized j} |b_j|
/// on standardized columns. Unpenalized coefficients are re-solved exactly
/// after every sweep over the penalized ones.
LassoFit lasso_fit(const Dataset& d, double lambda, const std::optional<Eigen::VectorXd>& warm_start = std::nullopt,
                   const PenalizedOptions& options = {});

struct CoordinateResult {
    Eigen::VectorXd b;  // standardized scale
    int sweeps = 0;
    bool converged = false;
};

/// Solver core on a prepared problem; `b` is the starting point.
CoordinateResult solve_lasso(const StandardizedProblem& problem, double lambda, Eigen::VectorXd b,
                             const PenalizedOptions& options);

LassoFit make_lasso_fit(const StandardizedProblem& problem, double lambda, const CoordinateResult& result);

}  // namespace seedsweep::penalized
