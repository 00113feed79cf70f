#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "seedsweep/bkmr/mcmc.hpp"
#include "seedsweep/bkmr/posterior.hpp"
#include "seedsweep/core/dataset.hpp"
#include "seedsweep/penalized/design.hpp"
#include "seedsweep/wqs/wqs.hpp"

namespace seedsweep::sweep {

enum class Model { Lasso, GroupLasso, Wqs, Bkmr };

std::string model_name(Model m);
/// Accepts lasso, group_lasso, wqs, bkmr.
Model parse_model(const std::string& name);

struct PenalizedSettings {
    int folds = 10;
    std::size_t lambda_count = 100;
    double lambda_min_ratio = 1e-4;
    bool one_se_rule = false;
    penalized::PenalizedOptions fit;
};

struct BkmrSettings {
    bkmr::BkmrConfig mcmc;
    bool curves = true;  // exposure-response curves and mixture effects
    std::vector<double> mixture_percentiles{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
};

struct SweepConfig {
    Model model = Model::Lasso;
    std::vector<std::uint64_t> seeds = default_seeds();
    PenalizedSettings penalized;
    wqs::WqsConfig wqs;
    BkmrSettings bkmr;
    int jobs = 1;

    /// 1..100
    static std::vector<std::uint64_t> default_seeds();
    /// Rejects an empty or duplicated seed list and invalid model settings.
    void validate(const Dataset& d) const;
};

struct PenalizedSeedResult {
    Eigen::VectorXd beta;  // over [Z | X]; intercept column holds the intercept
    double lambda = 0.0;
    std::size_t lambda_index = 0;
    std::size_t retained = 0;  // nonzero penalized coefficients
    std::vector<double> lambda_grid;
    std::vector<double> cv_mean;
    std::vector<double> cv_se;
    std::vector<double> group_norms;  // group lasso only
    bool converged = true;
};

struct BkmrSeedResult {
    bkmr::PipTable pips;
    std::vector<bkmr::ExposureResponse> curves;
    std::vector<bkmr::MixtureEffect> mixture;
    double rhat = 1.0;
    bool rhat_flag = false;
    double lam_acceptance = 0.0;
    double r_acceptance = 0.0;
    double toggle_acceptance = 0.0;
};

struct SeedResult {
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error_code;
    std::string error_message;
    std::optional<PenalizedSeedResult> penalized;
    std::optional<wqs::WqsFit> wqs;
    std::optional<BkmrSeedResult> bkmr;
};

/// Names needed to label results without the dataset at hand.
struct SweepLabels {
    std::vector<std::string> exposure_names;
    std::vector<std::string> covariate_names;
    std::vector<std::string> group_names;
    std::vector<int> group_assignments;
    std::vector<bool> penalty_mask;

    static SweepLabels from(const Dataset& d);
};

struct SweepResult {
    Model model = Model::Lasso;
    SweepLabels labels;
    double tau = 0.0;  // WQS importance threshold
    std::vector<SeedResult> results;  // ascending seed

    std::size_t success_count() const;
};

/// Runs one seed; errors propagate.
SeedResult run_seed(const Dataset& d, const SweepConfig& cfg, std::uint64_t seed);

/**
 * Runs every seed of the configuration on a pool of `cfg.jobs` threads.
 * Each seed owns its own random stream, so the result list is identical
 * for any pool width. Per-seed failures are recorded in place; a sweep in
 * which every seed fails throws.
 */
SweepResult run_sweep(const Dataset& d, const SweepConfig& cfg);

}  // namespace seedsweep::sweep
