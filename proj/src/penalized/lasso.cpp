#include "seedsweep/penalized/lasso.hpp"

#include <algorithm>
#include <cmath>

#include "seedsweep/core/error.hpp"

namespace seedsweep::penalized {

LambdaGrid make_lambda_grid(double lambda_max, std::size_t count, double ratio) {
    if (!(lambda_max > 0.0) || !std::isfinite(lambda_max)) {
        throw_model("E_MODEL_LAMBDA_MAX", "lambda_max must be positive; no penalized signal to shrink");
    }
    if (count == 0) throw_usage("E_USAGE_GRID", "lambda grid needs at least one value");
    if (!(ratio > 0.0 && ratio < 1.0)) throw_usage("E_USAGE_GRID", "lambda grid ratio must lie in (0,1)");
    LambdaGrid grid{{}, lambda_max, ratio, count};
    grid.values.resize(count);
    grid.values[0] = lambda_max;
    for (std::size_t i = 1; i < count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(count - 1);
        grid.values[i] = lambda_max * std::pow(ratio, t);
    }
    return grid;
}

double lambda_max(const Dataset& d, const PenalizedOptions& options) {
    return StandardizedProblem(d, options).lambda_max();
}

CoordinateResult solve_lasso(const StandardizedProblem& problem, double lambda, Eigen::VectorXd b,
                             const PenalizedOptions& options) {
    if (!(lambda >= 0.0)) throw_usage("E_USAGE_LAMBDA", "lambda must be non-negative");
    const auto& G = problem.gram();
    const std::size_t q = problem.penalized_count();
    const auto u = static_cast<Eigen::Index>(problem.coordinate_count() - q);
    CoordinateResult out;
    Eigen::VectorXd previous_unpen(u);
    for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
        double max_change = 0.0;
        for (std::size_t k = 0; k < q; ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            const double z = problem.partial_correlation(k, b);
            const double updated = soft_threshold(z, lambda) / G(kk, kk);
            max_change = std::max(max_change, std::abs(updated - b(kk)));
            b(kk) = updated;
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

LassoFit make_lasso_fit(const StandardizedProblem& problem, double lambda, const CoordinateResult& result) {
    LassoFit fit;
    fit.beta = problem.to_original(result.b, fit.intercept);
    fit.lambda = lambda;
    fit.n_iterations = result.sweeps;
    fit.converged = result.converged;
    if (!result.converged) {
        fit.warnings.push_back("coordinate descent did not converge in " + std::to_string(result.sweeps) +
                               " sweeps at lambda=" + std::to_string(lambda));
    }
    return fit;
}

LassoFit lasso_fit(const Dataset& d, double lambda, const std::optional<Eigen::VectorXd>& warm_start,
                   const PenalizedOptions& options) {
    const StandardizedProblem problem(d, options);
    Eigen::VectorXd start = problem.initial(warm_start ? &*warm_start : nullptr);
    return make_lasso_fit(problem, lambda, solve_lasso(problem, lambda, std::move(start), options));
}

}  // namespace seedsweep::penalized
