#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace seedsweep {

/// Partition of the p exposures into G named groups.
struct GroupSpec {
    std::vector<int> assignments;          // length p, values in [0, G)
    std::vector<std::string> group_names;  // length G

    std::size_t group_count() const { return group_names.size(); }
    std::vector<std::size_t> members(int group) const;
    std::vector<std::size_t> sizes() const;

    /// Throws a data error unless every exposure maps to a valid group and
    /// every group has at least one member.
    void validate(std::size_t exposure_count) const;

    /// One group per exposure, named after it.
    static GroupSpec singletons(const std::vector<std::string>& exposure_names);
};

/**
 * Analysis dataset: outcome, exposure mixture, and covariates.
 *
 * Coefficient vectors over the full design use the column order
 * [Z | X], i.e. exposures first. X carries its own intercept column of ones.
 * penalty_mask has one flag per design column; by default exposures are
 * penalized and covariates (including the intercept) are not.
 */
struct Dataset {
    Eigen::VectorXd y;
    Eigen::MatrixXd Z;
    Eigen::MatrixXd X;
    std::vector<std::string> exposure_names;
    std::vector<std::string> covariate_names;
    std::vector<bool> penalty_mask;
    GroupSpec groups;

    std::size_t n() const { return static_cast<std::size_t>(y.size()); }
    std::size_t p() const { return static_cast<std::size_t>(Z.cols()); }
    std::size_t c() const { return static_cast<std::size_t>(X.cols()); }

    /// Index within X of the all-ones column, if present.
    std::optional<std::size_t> intercept_column() const;

    /// [Z | X] as one matrix.
    Eigen::MatrixXd design() const;

    /// Checks shapes, finiteness, names, the intercept column, the mask and
    /// the group partition. Throws a data error on the first violation.
    void validate() const;

    Dataset subset_rows(std::span<const std::size_t> rows) const;

    /// Same data with exposure columns reordered: new column j is old
    /// column order[j]. Mask and group assignments follow the columns.
    Dataset permute_exposures(std::span<const std::size_t> order) const;
};

/// Penalize exposures, leave covariates unpenalized.
std::vector<bool> default_penalty_mask(std::size_t p, std::size_t c);

}  // namespace seedsweep
