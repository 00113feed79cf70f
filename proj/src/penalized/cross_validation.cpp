#include "seedsweep/penalized/cross_validation.hpp"

#include <cmath>
#include <functional>

#include "seedsweep/core/error.hpp"
#include "seedsweep/core/transform.hpp"
#include "seedsweep/penalized/group_lasso.hpp"

namespace seedsweep::penalized {

namespace {

// Fits the training rows along the grid; returns original-scale coefficients per lambda.
using PathFitter = std::function<std::vector<Eigen::VectorXd>(const Dataset& train, const LambdaGrid& grid)>;

CvCurve run_cv(const Dataset& d, int k, const LambdaGrid& grid, Rng& rng, const CvOptions& options,
               const PathFitter& fit_path) {
    if (grid.values.empty()) throw_usage("E_USAGE_GRID", "empty lambda grid");
    CvCurve curve;
    curve.grid = grid;
    curve.fold_labels = kfold_assign(d.n(), k, rng);

    const std::size_t L = grid.values.size();
    const auto folds = static_cast<std::size_t>(k);
    curve.fold_error.assign(folds, std::vector<double>(L, 0.0));
    const Eigen::MatrixXd design = d.design();

    for (std::size_t f = 0; f < folds; ++f) {
        std::vector<std::size_t> train;
        std::vector<std::size_t> test;
        for (std::size_t i = 0; i < d.n(); ++i) {
            (static_cast<std::size_t>(curve.fold_labels[i]) == f ? test : train).push_back(i);
        }
        if (test.size() < 2) {
            throw_data("E_DATA_FOLD_SIZE", "fold " + std::to_string(f) + " has fewer than 2 observations");
        }
        const Dataset training = d.subset_rows(train);
        const std::vector<Eigen::VectorXd> path = fit_path(training, grid);
        for (std::size_t l = 0; l < L; ++l) {
            double sse = 0.0;
            for (auto i : test) {
                const auto ii = static_cast<Eigen::Index>(i);
                const double resid = d.y(ii) - design.row(ii).dot(path[l]);
                sse += resid * resid;
            }
            curve.fold_error[f][l] = sse / static_cast<double>(test.size());
        }
    }

    curve.mean_error.assign(L, 0.0);
    curve.se_error.assign(L, 0.0);
    for (std::size_t l = 0; l < L; ++l) {
        double sum = 0.0;
        for (std::size_t f = 0; f < folds; ++f) sum += curve.fold_error[f][l];
        const double m = sum / static_cast<double>(folds);
        double ss = 0.0;
        for (std::size_t f = 0; f < folds; ++f) ss += (curve.fold_error[f][l] - m) * (curve.fold_error[f][l] - m);
        curve.mean_error[l] = m;
        curve.se_error[l] = std::sqrt(ss / static_cast<double>(folds - 1)) / std::sqrt(static_cast<double>(folds));
    }
    curve.chosen_index = select_lambda(curve.mean_error, curve.se_error, options.one_se_rule);
    curve.chosen_lambda = grid.values[curve.chosen_index];
    return curve;
}

}  // namespace

std::size_t select_lambda(const std::vector<double>& mean_error, const std::vector<double>& se_error,
                          bool one_se_rule) {
    if (mean_error.empty()) throw_usage("E_USAGE_GRID", "empty CV error curve");
    std::size_t best = 0;
    for (std::size_t l = 1; l < mean_error.size(); ++l) {
        if (mean_error[l] < mean_error[best]) best = l;
    }
    if (!one_se_rule) return best;
    const double limit = mean_error[best] + se_error[best];
    for (std::size_t l = 0; l <= best; ++l) {
        if (mean_error[l] <= limit) return l;
    }
    return best;
}

CvCurve cv_lasso(const Dataset& d, int k, const LambdaGrid& grid, Rng& rng, const CvOptions& options) {
    return run_cv(d, k, grid, rng, options, [&options](const Dataset& train, const LambdaGrid& g) {
        const StandardizedProblem problem(train, options.fit);
        std::vector<Eigen::VectorXd> path;
        Eigen::VectorXd b = problem.initial(nullptr);
        for (double lambda : g.values) {
            auto result = solve_lasso(problem, lambda, b, options.fit);
            b = result.b;
            path.push_back(make_lasso_fit(problem, lambda, result).beta);
        }
        return path;
    });
}

CvCurve cv_group_lasso(const Dataset& d, int k, const LambdaGrid& grid, Rng& rng, const CvOptions& options) {
    require_grouped_penalty(d);
    return run_cv(d, k, grid, rng, options, [&options](const Dataset& train, const LambdaGrid& g) {
        const StandardizedProblem problem(train, options.fit);
        const GroupBlocks blocks(problem, train.groups);
        std::vector<Eigen::VectorXd> path;
        Eigen::VectorXd b = problem.initial(nullptr);
        for (double lambda : g.values) {
            auto result = solve_group_lasso(problem, blocks, lambda, b, options.fit);
            b = result.b;
            path.push_back(make_group_lasso_fit(problem, blocks, lambda, result).beta);
        }
        return path;
    });
}

}  // namespace seedsweep::penalized
