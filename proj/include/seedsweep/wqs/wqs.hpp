#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "seedsweep/core/dataset.hpp"
#include "seedsweep/core/rng.hpp"

namespace seedsweep::wqs {

enum class Direction { Positive, Negative };

struct WqsConfig {
    int q = 4;
    double train_fraction = 0.4;
    int n_bootstrap = 100;
    Direction direction = Direction::Positive;
    std::optional<double> tau;  // importance threshold; 1/p when unset
    int max_iterations = 500;
    double gradient_tolerance = 1e-6;

    double tau_for(std::size_t p) const { return tau ? *tau : 1.0 / static_cast<double>(p); }
    void validate(std::size_t p) const;
};

struct Split {
    std::vector<std::size_t> train;  // ascending
    std::vector<std::size_t> test;   // ascending
};

/// Shuffles 0..n-1; the first floor(frac * n) become training rows.
Split split_train_test(std::size_t n, double frac, Rng& rng);

/// Column-wise quantile scores of an exposure matrix.
Eigen::MatrixXd quantile_scores(const Eigen::MatrixXd& Z, int q);

struct WeightEstimate {
    Eigen::VectorXd weights;
    std::vector<Eigen::VectorXd> bootstrap_weights;  // successful resamples only
    std::vector<double> bootstrap_index_beta;
    std::size_t n_matching = 0;       // resamples whose index coefficient has the configured sign
    std::size_t n_failed = 0;         // resamples skipped after an optimizer failure
    std::size_t n_nonconverged = 0;   // hit the iteration cap; kept
    bool flagged = false;             // no resample matched the direction
};

/**
 * Bootstrap estimate of simplex-constrained mixture weights.
 *
 * Each resample fits  y ~ b0 + b1 * (Q w) + X g  by least squares with
 * w = softmax(theta). The linear coefficients are profiled out and theta is
 * optimized by BFGS from zero. `X` must contain the intercept column.
 */
WeightEstimate estimate_weights(const Eigen::MatrixXd& Q, const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                const WqsConfig& config, Rng& rng);

/// Row-wise sum_j w_j q_ij.
Eigen::VectorXd wqs_index(const Eigen::VectorXd& weights, const Eigen::MatrixXd& Q);

struct IndexRegression {
    double beta = 0.0;
    double se = 0.0;
    std::pair<double, double> ci95{0.0, 0.0};  // beta +/- 1.96 se
    double residual_df = 0.0;
};

/// OLS of y on [index, X]; X carries the intercept.
IndexRegression fit_index_regression(const Eigen::VectorXd& y, const Eigen::VectorXd& index, const Eigen::MatrixXd& X);

/// Exposures whose weight strictly exceeds tau.
std::vector<std::size_t> important_components(const Eigen::VectorXd& weights, double tau);

struct WqsFit {
    Eigen::VectorXd weights;
    double index_beta = 0.0;
    double index_se = 0.0;
    std::pair<double, double> ci95{0.0, 0.0};
    double residual_df = 0.0;
    std::vector<std::size_t> train_indices;
    std::vector<std::size_t> test_indices;
    std::uint64_t seed = 0;
    bool flagged = false;
    std::size_t n_matching = 0;
    std::size_t n_failed = 0;
};

/// Quantile scoring on the full sample, then split, weights on the training
/// rows and the index regression on the hold-out rows, all from one stream.
WqsFit wqs_run(const Dataset& d, const WqsConfig& config, std::uint64_t seed);

}  // namespace seedsweep::wqs
