#include "seedsweep/bkmr/kernel.hpp"

#include "seedsweep/core/error.hpp"

namespace seedsweep::bkmr {

namespace {

void check_scales(const Eigen::VectorXd& r, Eigen::Index p) {
    if (r.size() != p) throw_usage("E_USAGE_SHAPE", "kernel scale count does not match exposure count");
    if ((r.array() < 0.0).any()) throw_usage("E_USAGE_KERNEL", "kernel scales must be non-negative");
}

}  // namespace

Eigen::MatrixXd gaussian_kernel(const Eigen::MatrixXd& Z, const Eigen::VectorXd& r) {
    check_scales(r, Z.cols());
    const auto n = Z.rows();
    Eigen::MatrixXd K(n, n);
    Eigen::ArrayXd dist(n);
    for (Eigen::Index b = 0; b < n; ++b) {
        dist.setZero();
        for (Eigen::Index m = 0; m < Z.cols(); ++m) {
            if (r(m) == 0.0) continue;
            dist += r(m) * (Z.col(m).array() - Z(b, m)).square();
        }
        K.col(b) = (-dist).exp().matrix();
        K(b, b) = 1.0;
    }
    // exact symmetry
    K.triangularView<Eigen::StrictlyUpper>() = K.transpose();
    return K;
}

Eigen::MatrixXd gaussian_cross_kernel(const Eigen::MatrixXd& Zq, const Eigen::MatrixXd& Z, const Eigen::VectorXd& r) {
    check_scales(r, Z.cols());
    if (Zq.cols() != Z.cols()) throw_usage("E_USAGE_SHAPE", "query and training exposure counts differ");
    Eigen::MatrixXd K(Zq.rows(), Z.rows());
    Eigen::ArrayXd dist(Zq.rows());
    for (Eigen::Index b = 0; b < Z.rows(); ++b) {
        dist.setZero();
        for (Eigen::Index m = 0; m < Z.cols(); ++m) {
            if (r(m) == 0.0) continue;
            dist += r(m) * (Zq.col(m).array() - Z(b, m)).square();
        }
        K.col(b) = (-dist).exp().matrix();
    }
    return K;
}

}  // namespace seedsweep::bkmr
