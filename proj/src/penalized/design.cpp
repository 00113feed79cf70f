#include "seedsweep/penalized/design.hpp"

#include <cmath>
#include <string>

#include "seedsweep/core/error.hpp"

namespace seedsweep::penalized {

StandardizedProblem::StandardizedProblem(const Dataset& d, const PenalizedOptions& options) {
    n_ = d.n();
    const std::size_t p = d.p();
    design_columns_ = p + d.c();
    if (d.penalty_mask.size() != design_columns_) throw_data("E_DATA_MASK", "penalty mask size mismatch");
    const auto icpt = d.intercept_column();
    if (!icpt) throw_data("E_DATA_INTERCEPT", "covariate matrix has no intercept column of ones");
    intercept_index_ = p + *icpt;

    for (std::size_t j = 0; j < design_columns_; ++j) {
        if (d.penalty_mask[j] && j != intercept_index_) design_index_.push_back(j);
    }
    n_penalized_ = design_index_.size();
    for (std::size_t j = 0; j < design_columns_; ++j) {
        if (!d.penalty_mask[j] && j != intercept_index_) design_index_.push_back(j);
    }

    const auto m = static_cast<Eigen::Index>(design_index_.size());
    const auto rows = static_cast<Eigen::Index>(n_);
    const double nd = static_cast<double>(n_);
    Eigen::MatrixXd S(rows, m);
    means_.resize(m);
    sds_.resize(m);
    for (Eigen::Index k = 0; k < m; ++k) {
        const auto j = static_cast<Eigen::Index>(design_index_[static_cast<std::size_t>(k)]);
        const auto col = j < static_cast<Eigen::Index>(p) ? d.Z.col(j) : d.X.col(j - static_cast<Eigen::Index>(p));
        const double mu = col.mean();
        const double sd = std::sqrt((col.array() - mu).square().sum() / nd);
        if (!(sd > 0.0)) {
            const std::string name = j < static_cast<Eigen::Index>(p)
                                         ? d.exposure_names[static_cast<std::size_t>(j)]
                                         : d.covariate_names[static_cast<std::size_t>(j) - p];
            throw_data("E_DATA_ZERO_VARIANCE", "column '" + name + "' has zero variance");
        }
        const bool scale = static_cast<std::size_t>(k) < n_penalized_ || options.standardize_covariates;
        means_(k) = mu;
        sds_(k) = scale ? sd : 1.0;
        S.col(k) = (col.array() - mu) / sds_(k);
    }
    y_mean_ = d.y.mean();
    const Eigen::VectorXd yc = d.y.array() - y_mean_;
    yty_ = yc.squaredNorm() / nd;
    gram_ = (S.transpose() * S) / nd;
    xty_ = (S.transpose() * yc) / nd;

    const auto u = m - static_cast<Eigen::Index>(n_penalized_);
    if (u > 0) {
        unpenalized_llt_.compute(gram_.bottomRightCorner(u, u));
        if (unpenalized_llt_.info() != Eigen::Success) {
            throw_data("E_DATA_SINGULAR", "unpenalized covariates are collinear");
        }
    }
}

double StandardizedProblem::partial_correlation(std::size_t k, const Eigen::VectorXd& b) const {
    const auto kk = static_cast<Eigen::Index>(k);
    return xty_(kk) - gram_.col(kk).dot(b) + gram_(kk, kk) * b(kk);
}

void StandardizedProblem::solve_unpenalized(Eigen::VectorXd& b) const {
    const auto m = b.size();
    const auto q = static_cast<Eigen::Index>(n_penalized_);
    const auto u = m - q;
    if (u == 0) return;
    const Eigen::VectorXd rhs = xty_.tail(u) - gram_.bottomLeftCorner(u, q) * b.head(q);
    b.tail(u) = unpenalized_llt_.solve(rhs);
}

double StandardizedProblem::loss(const Eigen::VectorXd& b) const {
    return 0.5 * (yty_ - 2.0 * b.dot(xty_) + b.dot(gram_ * b));
}

Eigen::VectorXd StandardizedProblem::to_original(const Eigen::VectorXd& b, double& intercept) const {
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(design_columns_));
    intercept = y_mean_;
    for (Eigen::Index k = 0; k < b.size(); ++k) {
        const double coef = b(k) / sds_(k);
        beta(static_cast<Eigen::Index>(design_index_[static_cast<std::size_t>(k)])) = coef;
        intercept -= coef * means_(k);
    }
    beta(static_cast<Eigen::Index>(intercept_index_)) = intercept;
    return beta;
}

Eigen::VectorXd StandardizedProblem::to_standardized(const Eigen::VectorXd& beta) const {
    if (beta.size() != static_cast<Eigen::Index>(design_columns_)) {
        throw_usage("E_USAGE_WARM_START", "warm start has wrong length");
    }
    Eigen::VectorXd b(static_cast<Eigen::Index>(design_index_.size()));
    for (Eigen::Index k = 0; k < b.size(); ++k) {
        b(k) = beta(static_cast<Eigen::Index>(design_index_[static_cast<std::size_t>(k)])) * sds_(k);
    }
    return b;
}

Eigen::VectorXd StandardizedProblem::initial(const Eigen::VectorXd* warm_beta) const {
    Eigen::VectorXd b = warm_beta ? to_standardized(*warm_beta)
                                  : Eigen::VectorXd::Zero(static_cast<Eigen::Index>(design_index_.size()));
    solve_unpenalized(b);
    return b;
}

double StandardizedProblem::lambda_max() const {
    const Eigen::VectorXd b = initial(nullptr);
    double out = 0.0;
    for (std::size_t k = 0; k < n_penalized_; ++k) out = std::max(out, std::abs(partial_correlation(k, b)));
    return out;
}

}  // namespace seedsweep::penalized
