#include "seedsweep/core/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "seedsweep/core/error.hpp"
#include "seedsweep/core/stats.hpp"

namespace seedsweep {

Standardization standardize(const Eigen::MatrixXd& M, const std::vector<bool>& skip) {
    if (skip.size() != static_cast<std::size_t>(M.cols())) {
        throw_usage("E_USAGE_MASK", "standardize: skip mask length does not match column count");
    }
    const double n = static_cast<double>(M.rows());
    Standardization out{M, Eigen::VectorXd::Zero(M.cols()), Eigen::VectorXd::Ones(M.cols())};
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
        if (skip[static_cast<std::size_t>(j)]) continue;
        const double mu = M.col(j).mean();
        const double sd = std::sqrt((M.col(j).array() - mu).square().sum() / n);
        if (!(sd > 0.0)) {
            throw_data("E_DATA_ZERO_VARIANCE", "column " + std::to_string(j) + " has zero variance");
        }
        out.means(j) = mu;
        out.sds(j) = sd;
        out.values.col(j) = (M.col(j).array() - mu) / sd;
    }
    return out;
}

std::vector<int> quantile_bin(std::span<const double> x, int q) {
    if (q < 2 || x.size() < static_cast<std::size_t>(q)) {
        throw_data("E_DATA_QUANTILE", "degenerate quantile binning");
    }
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> cuts(static_cast<std::size_t>(q - 1));
    for (int j = 1; j < q; ++j) {
        cuts[static_cast<std::size_t>(j - 1)] = quantile_sorted(sorted, static_cast<double>(j) / q);
    }
    std::vector<int> scores(x.size());
    std::set<int> distinct;
    for (std::size_t i = 0; i < x.size(); ++i) {
        // number of cut points strictly below x
        const auto it = std::lower_bound(cuts.begin(), cuts.end(), x[i]);
        scores[i] = static_cast<int>(it - cuts.begin());
        distinct.insert(scores[i]);
    }
    if (distinct.size() < 2) throw_data("E_DATA_QUANTILE", "degenerate quantile binning");
    return scores;
}

std::vector<int> kfold_assign(std::size_t n, int k, Rng& rng) {
    if (k < 2 || static_cast<std::size_t>(k) > n) {
        throw_usage("E_USAGE_FOLDS", "fold count must satisfy 2 <= k <= n (k=" + std::to_string(k) +
                                         ", n=" + std::to_string(n) + ")");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[order[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
    return labels;
}

}  // namespace seedsweep
