#pragma once

// Helpers shared by the unit and acceptance tests. Everything here is
// written against Eigen directly so it can serve as an oracle for the
// library's own routines.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "seedsweep/core/dataset.hpp"
#include "seedsweep/core/rng.hpp"

namespace testsupport {

/// Random regression instance: p correlated exposures, an intercept plus
/// `extra` continuous covariates, sparse true exposure effects.
inline seedsweep::Dataset random_instance(seedsweep::Rng& rng, std::size_t n, std::size_t p, std::size_t extra,
                                          double noise = 1.0) {
    seedsweep::Dataset d;
    const auto N = static_cast<Eigen::Index>(n);
    const auto P = static_cast<Eigen::Index>(p);
    d.Z.resize(N, P);
    d.X.resize(N, static_cast<Eigen::Index>(extra + 1));
    const double share = 0.5 * rng.uniform01();
    for (Eigen::Index i = 0; i < N; ++i) {
        const double common = rng.normal();
        for (Eigen::Index j = 0; j < P; ++j)
            d.Z(i, j) = (1.0 + 0.5 * static_cast<double>(j % 3)) * (std::sqrt(share) * common + std::sqrt(1 - share) * rng.normal()) + 0.3 * static_cast<double>(j);
        d.X(i, 0) = 1.0;
        for (Eigen::Index k = 1; k <= static_cast<Eigen::Index>(extra); ++k) d.X(i, k) = rng.normal() * 2.0 + 1.0;
    }
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(P);
    for (Eigen::Index j = 0; j < P; ++j) {
        if (rng.uniform01() < 0.5) beta(j) = (rng.uniform01() < 0.5 ? -1.0 : 1.0) * (0.2 + 0.6 * rng.uniform01());
    }
    Eigen::VectorXd gamma(d.X.cols());
    for (Eigen::Index k = 0; k < gamma.size(); ++k) gamma(k) = rng.normal();
    d.y = d.Z * beta + d.X * gamma;
    for (Eigen::Index i = 0; i < N; ++i) d.y(i) += noise * rng.normal();
    for (std::size_t j = 0; j < p; ++j) d.exposure_names.push_back("e" + std::to_string(j + 1));
    d.covariate_names.push_back("intercept");
    for (std::size_t k = 1; k <= extra; ++k) d.covariate_names.push_back("c" + std::to_string(k));
    d.penalty_mask = seedsweep::default_penalty_mask(p, extra + 1);
    d.groups = seedsweep::GroupSpec::singletons(d.exposure_names);
    return d;
}

/// Exposures centered and divided by their population sd.
inline Eigen::MatrixXd standardized_exposures(const Eigen::MatrixXd& Z) {
    Eigen::MatrixXd A = Z.rowwise() - Z.colwise().mean();
    for (Eigen::Index j = 0; j < A.cols(); ++j) A.col(j) /= std::sqrt(A.col(j).squaredNorm() / static_cast<double>(A.rows()));
    return A;
}

inline Eigen::VectorXd population_sds(const Eigen::MatrixXd& Z) {
    const Eigen::MatrixXd A = Z.rowwise() - Z.colwise().mean();
    Eigen::VectorXd s(A.cols());
    for (Eigen::Index j = 0; j < A.cols(); ++j) s(j) = std::sqrt(A.col(j).squaredNorm() / static_cast<double>(A.rows()));
    return s;
}

/// Least squares through a column-pivoted QR.
inline Eigen::VectorXd ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    return X.colPivHouseholderQr().solve(y);
}

/// Fresh empty directory under the system temp directory.
inline std::filesystem::path scratch_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("seedsweep-test-" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace testsupport
