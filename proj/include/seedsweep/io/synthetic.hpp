#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "seedsweep/core/dataset.hpp"

namespace seedsweep::io {

enum class Truth {
    Null,            // h = 0
    Linear,          // h = sum_m beta_m z_m
    QuadraticSingle  // h = quadratic_coefficient * z_1²
};

std::string truth_name(Truth t);
Truth parse_truth(const std::string& name);

/**
 * Simulated stand-in for an exposure-mixture study.
 *
 * Exposures z1..zp are jointly normal with unit variances and either an
 * exchangeable correlation rho or an explicit correlation matrix. Groups
 * g1..gG are contiguous blocks of exposures. The outcome is
 *   y = h(z) + 0.5 x_cont - 0.3 x_bin + noise_sd * e
 * with x_cont standard normal and x_bin Bernoulli(0.5).
 */
struct SyntheticSpec {
    std::size_t n = 500;
    std::size_t p = 6;
    std::size_t groups = 3;
    double rho = 0.0;
    std::optional<Eigen::MatrixXd> correlation;
    Truth truth = Truth::Linear;
    std::vector<double> beta;  // Linear: length p, or empty for all zero
    double quadratic_coefficient = 1.0;
    double noise_sd = 1.0;
    std::uint64_t seed = 1;

    static constexpr double kContinuousEffect = 0.5;
    static constexpr double kBinaryEffect = -0.3;

    void validate() const;
    Eigen::MatrixXd correlation_matrix() const;
};

/// Pure function of the spec. Draw order: exposures row by row, then per
/// row the continuous covariate, binary covariate and noise.
Dataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace seedsweep::io
