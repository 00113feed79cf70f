#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "seedsweep/core/dataset.hpp"

namespace seedsweep::penalized {

struct PenalizedOptions {
    double tolerance = 1e-7;        // max coefficient change per sweep
    int max_sweeps = 100000;
    bool standardize_covariates = true;
    double newton_tolerance = 1e-9;  // group block norm solve
};

/**
 * Gram-form view of a partially penalized least-squares problem on
 * standardized data.
 *
 * Fitted coordinates are every design column except the intercept, ordered
 * penalized first. The intercept is handled by centering. Penalized columns
 * are always scaled to unit population sd; unpenalized ones optionally.
 */
class StandardizedProblem {
public:
    StandardizedProblem(const Dataset& d, const PenalizedOptions& options);

    std::size_t n() const { return n_; }
    std::size_t coordinate_count() const { return static_cast<std::size_t>(xty_.size()); }
    std::size_t penalized_count() const { return n_penalized_; }
    std::size_t design_columns() const { return design_columns_; }

    /// Design column (index into [Z | X]) of fitted coordinate k.
    std::size_t design_index(std::size_t k) const { return design_index_[k]; }

    const Eigen::MatrixXd& gram() const { return gram_; }
    const Eigen::VectorXd& xty() const { return xty_; }

    /// x_kᵀ(y - Xb)/n + G_kk b_k, i.e. the coordinate-wise partial correlation.
    double partial_correlation(std::size_t k, const Eigen::VectorXd& b) const;

    /// Solves the unpenalized block exactly given the penalized coefficients.
    void solve_unpenalized(Eigen::VectorXd& b) const;

    /// (1/2n)||y - Xb||² on the standardized scale.
    double loss(const Eigen::VectorXd& b) const;

    /// Original-scale coefficients over [Z | X]; the intercept column holds
    /// the intercept, which is also written to `intercept`.
    Eigen::VectorXd to_original(const Eigen::VectorXd& b, double& intercept) const;

    /// Inverse of to_original for warm starts (intercept entry ignored).
    Eigen::VectorXd to_standardized(const Eigen::VectorXd& beta) const;

    /// Largest |partial correlation| over penalized coordinates at the
    /// unpenalized-only fit.
    double lambda_max() const;

    /// Start vector: given penalized part, unpenalized block solved.
    Eigen::VectorXd initial(const Eigen::VectorXd* warm_beta) const;

private:
    std::size_t n_ = 0;
    std::size_t n_penalized_ = 0;
    std::size_t design_columns_ = 0;
    std::size_t intercept_index_ = 0;
    std::vector<std::size_t> design_index_;
    Eigen::VectorXd means_;
    Eigen::VectorXd sds_;
    double y_mean_ = 0.0;
    double yty_ = 0.0;  // centered, /n
    Eigen::MatrixXd gram_;
    Eigen::VectorXd xty_;
    Eigen::LLT<Eigen::MatrixXd> unpenalized_llt_;
};

}  // namespace seedsweep::penalized
