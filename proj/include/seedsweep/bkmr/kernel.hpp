#pragma once

#include <Eigen/Dense>

namespace seedsweep::bkmr {

/// K_ab = exp(-sum_m r_m (Z_am - Z_bm)²). Throws on negative r.
Eigen::MatrixXd gaussian_kernel(const Eigen::MatrixXd& Z, const Eigen::VectorXd& r);

/// Cross kernel between query rows and training rows.
Eigen::MatrixXd gaussian_cross_kernel(const Eigen::MatrixXd& Zq, const Eigen::MatrixXd& Z, const Eigen::VectorXd& r);

}  // namespace seedsweep::bkmr
