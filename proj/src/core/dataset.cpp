#include "seedsweep/core/dataset.hpp"

#include <cmath>
#include <set>

#include "seedsweep/core/error.hpp"

namespace seedsweep {

std::vector<std::size_t> GroupSpec::members(int group) const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < assignments.size(); ++j) {
        if (assignments[j] == group) out.push_back(j);
    }
    return out;
}

std::vector<std::size_t> GroupSpec::sizes() const {
    std::vector<std::size_t> out(group_names.size(), 0);
    for (int g : assignments) {
        if (g >= 0 && static_cast<std::size_t>(g) < out.size()) ++out[static_cast<std::size_t>(g)];
    }
    return out;
}

void GroupSpec::validate(std::size_t exposure_count) const {
    if (assignments.size() != exposure_count) {
        throw_data("E_DATA_GROUPS", "group assignments cover " + std::to_string(assignments.size()) +
                                        " exposures, expected " + std::to_string(exposure_count));
    }
    if (group_names.empty()) throw_data("E_DATA_GROUPS", "no groups defined");
    for (std::size_t j = 0; j < assignments.size(); ++j) {
        const int g = assignments[j];
        if (g < 0 || static_cast<std::size_t>(g) >= group_names.size()) {
            throw_data("E_DATA_GROUPS", "exposure " + std::to_string(j) + " has invalid group index " +
                                            std::to_string(g));
        }
    }
    const auto counts = sizes();
    for (std::size_t g = 0; g < counts.size(); ++g) {
        if (counts[g] == 0) throw_data("E_DATA_GROUPS", "group '" + group_names[g] + "' has no members");
    }
}

GroupSpec GroupSpec::singletons(const std::vector<std::string>& exposure_names) {
    GroupSpec spec;
    spec.group_names = exposure_names;
    spec.assignments.resize(exposure_names.size());
    for (std::size_t j = 0; j < exposure_names.size(); ++j) spec.assignments[j] = static_cast<int>(j);
    return spec;
}

std::optional<std::size_t> Dataset::intercept_column() const {
    for (Eigen::Index k = 0; k < X.cols(); ++k) {
        if ((X.col(k).array() == 1.0).all()) return static_cast<std::size_t>(k);
    }
    return std::nullopt;
}

Eigen::MatrixXd Dataset::design() const {
    Eigen::MatrixXd D(Z.rows(), Z.cols() + X.cols());
    D << Z, X;
    return D;
}

void Dataset::validate() const {
    const auto rows = y.size();
    if (rows < 2) throw_data("E_DATA_SHAPE", "dataset needs at least 2 observations");
    if (Z.rows() != rows || X.rows() != rows) {
        throw_data("E_DATA_SHAPE", "outcome, exposure and covariate row counts differ");
    }
    if (Z.cols() == 0) throw_data("E_DATA_SHAPE", "dataset has no exposures");
    if (exposure_names.size() != p()) throw_data("E_DATA_SHAPE", "exposure name count does not match columns");
    if (covariate_names.size() != c()) throw_data("E_DATA_SHAPE", "covariate name count does not match columns");
    if (!y.allFinite()) throw_data("E_DATA_NONFINITE", "outcome contains non-finite values");
    for (Eigen::Index j = 0; j < Z.cols(); ++j) {
        if (!Z.col(j).allFinite()) {
            throw_data("E_DATA_NONFINITE", "exposure '" + exposure_names[static_cast<std::size_t>(j)] +
                                               "' contains non-finite values");
        }
    }
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        if (!X.col(j).allFinite()) {
            throw_data("E_DATA_NONFINITE", "covariate '" + covariate_names[static_cast<std::size_t>(j)] +
                                               "' contains non-finite values");
        }
    }
    std::set<std::string> seen;
    for (const auto& name : exposure_names) {
        if (!seen.insert(name).second) throw_data("E_DATA_NAMES", "duplicate column name '" + name + "'");
    }
    for (const auto& name : covariate_names) {
        if (!seen.insert(name).second) throw_data("E_DATA_NAMES", "duplicate column name '" + name + "'");
    }
    const auto icpt = intercept_column();
    if (!icpt) throw_data("E_DATA_INTERCEPT", "covariate matrix has no intercept column of ones");
    if (penalty_mask.size() != p() + c()) {
        throw_data("E_DATA_MASK", "penalty mask has " + std::to_string(penalty_mask.size()) +
                                      " entries, expected " + std::to_string(p() + c()));
    }
    if (penalty_mask[p() + *icpt]) throw_data("E_DATA_MASK", "the intercept must not be penalized");
    groups.validate(p());
}

Dataset Dataset::subset_rows(std::span<const std::size_t> rows) const {
    Dataset out;
    const auto m = static_cast<Eigen::Index>(rows.size());
    out.y.resize(m);
    out.Z.resize(m, Z.cols());
    out.X.resize(m, X.cols());
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto src = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]);
        out.y(i) = y(src);
        out.Z.row(i) = Z.row(src);
        out.X.row(i) = X.row(src);
    }
    out.exposure_names = exposure_names;
    out.covariate_names = covariate_names;
    out.penalty_mask = penalty_mask;
    out.groups = groups;
    return out;
}

Dataset Dataset::permute_exposures(std::span<const std::size_t> order) const {
    if (order.size() != p()) throw_data("E_DATA_SHAPE", "permutation length does not match exposure count");
    Dataset out = *this;
    for (std::size_t j = 0; j < order.size(); ++j) {
        const auto src = order[j];
        out.Z.col(static_cast<Eigen::Index>(j)) = Z.col(static_cast<Eigen::Index>(src));
        out.exposure_names[j] = exposure_names[src];
        out.penalty_mask[j] = penalty_mask[src];
        out.groups.assignments[j] = groups.assignments[src];
    }
    return out;
}

std::vector<bool> default_penalty_mask(std::size_t p, std::size_t c) {
    std::vector<bool> mask(p + c, false);
    for (std::size_t j = 0; j < p; ++j) mask[j] = true;
    return mask;
}

}  // namespace seedsweep
