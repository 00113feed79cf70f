#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "seedsweep/core/dataset.hpp"
#include "seedsweep/penalized/design.hpp"

namespace seedsweep::penalized {

struct GroupLassoFit {
    Eigen::VectorXd beta;  // over [Z | X], original scale
    double intercept = 0.0;
    double lambda = 0.0;
    std::vector<double> group_norms;  // ||beta_g||_2 per group, original scale
    int n_iterations = 0;
    bool converged = false;
    std::vector<std::string> warnings;
};

/// Group structure of a prepared problem: per-group coordinates plus the
/// eigen-decomposition of each diagonal Gram block.
class GroupBlocks {
public:
    GroupBlocks(const StandardizedProblem& problem, const GroupSpec& groups);

    std::size_t count() const { return members_.size(); }
    const std::vector<std::size_t>& members(std::size_t g) const { return members_[g]; }
    double weight(std::size_t g) const { return weights_[g]; }

    /// Exact minimizer of  ½ bᵀ G_gg b - uᵀ b + penalty ||b||  for penalty > 0.
    Eigen::VectorXd block_solve(std::size_t g, const Eigen::VectorXd& u, double penalty, double tolerance) const;

private:
    std::vector<std::vector<std::size_t>> members_;
    std::vector<double> weights_;  // sqrt(group size)
    std::vector<Eigen::MatrixXd> eigenvectors_;
    std::vector<Eigen::VectorXd> eigenvalues_;
};

/// Smallest lambda at which every group is zero.
double group_lambda_max(const Dataset& d, const PenalizedOptions& options = {});

/// Block coordinate descent for
///   (1/2n)||y - X b||² + lambda * sum_g sqrt(p_g) ||b_g||_2
/// with groups over the exposures; covariates are unpenalized.
GroupLassoFit group_lasso_fit(const Dataset& d, double lambda,
                              const std::optional<Eigen::VectorXd>& warm_start = std::nullopt,
                              const PenalizedOptions& options = {});

struct BlockResult {
    Eigen::VectorXd b;
    int sweeps = 0;
    bool converged = false;
};

BlockResult solve_group_lasso(const StandardizedProblem& problem, const GroupBlocks& blocks, double lambda,
                              Eigen::VectorXd b, const PenalizedOptions& options);

GroupLassoFit make_group_lasso_fit(const StandardizedProblem& problem, const GroupBlocks& blocks, double lambda,
                                   const BlockResult& result);

/// Checks that groups cover exactly the penalized coordinates.
void require_grouped_penalty(const Dataset& d);

}  // namespace seedsweep::penalized
