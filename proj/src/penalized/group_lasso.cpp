#include "seedsweep/penalized/group_lasso.hpp"

#include <algorithm>
#include <cmath>

#include "seedsweep/core/error.hpp"

namespace seedsweep::penalized {

namespace {

// Partial correlations of a block with the whole block removed from the fit.
Eigen::VectorXd block_partial(const StandardizedProblem& problem, const std::vector<std::size_t>& idx,
                              const Eigen::VectorXd& b) {
    const auto s = static_cast<Eigen::Index>(idx.size());
    Eigen::VectorXd partial(s);
    for (Eigen::Index a = 0; a < s; ++a) {
        const auto k = idx[static_cast<std::size_t>(a)];
        double z = problem.partial_correlation(k, b);
        for (Eigen::Index c = 0; c < s; ++c) {
            const auto other = static_cast<Eigen::Index>(idx[static_cast<std::size_t>(c)]);
            if (c != a) z += problem.gram()(static_cast<Eigen::Index>(k), other) * b(other);
        }
        partial(a) = z;
    }
    return partial;
}

}  // namespace

void require_grouped_penalty(const Dataset& d) {
    for (std::size_t j = 0; j < d.penalty_mask.size(); ++j) {
        const bool exposure = j < d.p();
        if (d.penalty_mask[j] != exposure) {
            throw_usage("E_USAGE_GROUP_MASK",
                        "group lasso penalizes exactly the grouped exposures; covariates stay unpenalized");
        }
    }
    d.groups.validate(d.p());
}

GroupBlocks::GroupBlocks(const StandardizedProblem& problem, const GroupSpec& groups) {
    const std::size_t q = problem.penalized_count();
    members_.resize(groups.group_count());
    for (std::size_t k = 0; k < q; ++k) {
        const std::size_t exposure = problem.design_index(k);
        members_[static_cast<std::size_t>(groups.assignments.at(exposure))].push_back(k);
    }
    const auto& G = problem.gram();
    for (const auto& idx : members_) {
        const auto s = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXd block(s, s);
        for (Eigen::Index a = 0; a < s; ++a) {
            for (Eigen::Index c = 0; c < s; ++c) {
                block(a, c) = G(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(a)]),
                                static_cast<Eigen::Index>(idx[static_cast<std::size_t>(c)]));
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(block);
        eigenvectors_.push_back(eig.eigenvectors());
        eigenvalues_.push_back(eig.eigenvalues().cwiseMax(0.0));
        weights_.push_back(std::sqrt(static_cast<double>(idx.size())));
    }
}

Eigen::VectorXd GroupBlocks::block_solve(std::size_t g, const Eigen::VectorXd& u, double penalty,
                                         double tolerance) const {
    const Eigen::MatrixXd& Q = eigenvectors_[g];
    const Eigen::VectorXd& ev = eigenvalues_[g];
    const Eigen::VectorXd v = Q.transpose() * u;
    const Eigen::ArrayXd v2 = v.array().square();
    // t = ||b|| solves  sum_i v_i² / (ev_i t + penalty)² = 1; the left side is
    // convex and decreasing in t, so Newton from t = 0 increases monotonically.
    double t = 0.0;
    for (int it = 0; it < 200; ++it) {
        const Eigen::ArrayXd denom = ev.array() * t + penalty;
        const double f = (v2 / denom.square()).sum() - 1.0;
        const double df = -2.0 * (v2 * ev.array() / denom.cube()).sum();
        if (!(df < 0.0)) break;
        const double step = f / df;
        t -= step;
        if (std::abs(step) <= tolerance * std::max(1.0, t)) break;
    }
    const Eigen::ArrayXd scale = t / (ev.array() * t + penalty);
    return Q * (scale * v.array()).matrix();
}

BlockResult solve_group_lasso(const StandardizedProblem& problem, const GroupBlocks& blocks, double lambda,
                              Eigen::VectorXd b, const PenalizedOptions& options) {
    if (!(lambda >= 0.0)) throw_usage("E_USAGE_LAMBDA", "lambda must be non-negative");
    const auto u = static_cast<Eigen::Index>(problem.coordinate_count() - problem.penalized_count());
    BlockResult out;
    Eigen::VectorXd previous_unpen(u);
    for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (std::size_t g = 0; g < blocks.count(); ++g) {
            const auto& idx = blocks.members(g);
            const auto s = static_cast<Eigen::Index>(idx.size());
            const Eigen::VectorXd partial = block_partial(problem, idx, b);
            const double penalty = lambda * blocks.weight(g);
            Eigen::VectorXd updated = Eigen::VectorXd::Zero(s);
            if (partial.norm() / blocks.weight(g) > lambda) {
                updated = blocks.block_solve(g, partial, penalty, options.newton_tolerance);
            }
            for (Eigen::Index a = 0; a < s; ++a) {
                const auto k = static_cast<Eigen::Index>(idx[static_cast<std::size_t>(a)]);
                max_change = std::max(max_change, std::abs(updated(a) - b(k)));
                b(k) = updated(a);
            }
        }
        previous_unpen = b.tail(u);
        problem.solve_unpenalized(b);
        if (u > 0) max_change = std::max(max_change, (b.tail(u) - previous_unpen).cwiseAbs().maxCoeff());
        out.sweeps = sweep;
        if (max_change < options.tolerance) {
            out.converged = true;
            break;
        }
    }
    out.b = std::move(b);
    return out;
}

GroupLassoFit make_group_lasso_fit(const StandardizedProblem& problem, const GroupBlocks& blocks, double lambda,
                                   const BlockResult& result) {
    GroupLassoFit fit;
    fit.beta = problem.to_original(result.b, fit.intercept);
    fit.lambda = lambda;
    fit.n_iterations = result.sweeps;
    fit.converged = result.converged;
    for (std::size_t g = 0; g < blocks.count(); ++g) {
        double ss = 0.0;
        for (auto k : blocks.members(g)) {
            const double coef = fit.beta(static_cast<Eigen::Index>(problem.design_index(k)));
            ss += coef * coef;
        }
        fit.group_norms.push_back(std::sqrt(ss));
    }
    if (!result.converged) {
        fit.warnings.push_back("block coordinate descent did not converge in " + std::to_string(result.sweeps) +
                               " sweeps at lambda=" + std::to_string(lambda));
    }
    return fit;
}

double group_lambda_max(const Dataset& d, const PenalizedOptions& options) {
    require_grouped_penalty(d);
    const StandardizedProblem problem(d, options);
    const GroupBlocks blocks(problem, d.groups);
    const Eigen::VectorXd b = problem.initial(nullptr);
    double out = 0.0;
    for (std::size_t g = 0; g < blocks.count(); ++g) {
        out = std::max(out, block_partial(problem, blocks.members(g), b).norm() / blocks.weight(g));
    }
    return out;
}

GroupLassoFit group_lasso_fit(const Dataset& d, double lambda, const std::optional<Eigen::VectorXd>& warm_start,
                              const PenalizedOptions& options) {
    require_grouped_penalty(d);
    const StandardizedProblem problem(d, options);
    const GroupBlocks blocks(problem, d.groups);
    Eigen::VectorXd start = problem.initial(warm_start ? &*warm_start : nullptr);
    return make_group_lasso_fit(problem, blocks, lambda,
                                solve_group_lasso(problem, blocks, lambda, std::move(start), options));
}

}  // namespace seedsweep::penalized
