#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "seedsweep/core/dataset.hpp"

namespace seedsweep::bkmr {

enum class Selection {
    Hierarchical,  // group and within-group indicators are sampled
    AllActive,     // every exposure in the kernel, no indicator moves
    None           // every indicator off and r = 0, so h is one shared constant
};

struct BkmrPriors {
    double sigma2_shape = 0.001;  // inverse gamma on sigma2
    double sigma2_scale = 0.001;
    double log_lam_min = -10.0;  // flat prior on log(lam)
    double log_lam_max = 10.0;
    double r_shape = 1.0;  // gamma slab for active r_m, truncated to (0, r_max)
    double r_rate = 1.0;
    double r_max = 100.0;
    double group_inclusion = 0.5;
    double within_inclusion = 0.5;
};

struct BkmrConfig {
    int n_iter = 5000;
    std::optional<int> burn_in;  // n_iter / 2 when unset
    int n_chains = 4;
    double r_proposal_sd = 0.3;
    double lam_proposal_sd = 0.3;
    BkmrPriors priors;
    int grid_points = 50;
    int thin = 10;  // every thin-th retained state feeds curve summaries
    std::size_t max_n = 2000;
    Selection selection = Selection::Hierarchical;
    double jitter = 1e-8;
    int jitter_attempts = 3;
    double rhat_threshold = 1.1;

    int burn() const { return burn_in ? *burn_in : n_iter / 2; }
    void validate() const;
};

/// One retained state, indexed in the dataset's own exposure and group order.
struct McmcState {
    Eigen::VectorXd beta;
    double sigma2 = 1.0;
    double lam = 1.0;
    Eigen::VectorXd r;
    std::vector<std::uint8_t> delta_group;
    std::vector<std::uint8_t> delta_within;
};

struct AcceptanceCounts {
    std::size_t proposed = 0;
    std::size_t accepted = 0;
    double rate() const { return proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0; }
};

struct McmcTrace {
    std::vector<McmcState> states;     // one per post-burn-in iteration
    std::vector<double> log_posterior;  // collapsed log posterior per retained state, up to a constant
    int chain = 0;
    std::uint64_t seed = 0;        // seed of the run
    std::uint64_t chain_seed = 0;  // stream seed actually used by this chain
    AcceptanceCounts lam_moves;
    AcceptanceCounts r_moves;
    AcceptanceCounts toggle_moves;
    int jitter_retries = 0;
};

struct McmcRun {
    std::vector<McmcTrace> chains;
    double rhat = 1.0;  // on the log posterior, across chains
    bool rhat_flag = false;  // rhat above the configured threshold
};

/// Stream seed of chain `chain` for run seed `seed`: output number chain + 1
/// of a splitmix64 expander started at `seed`.
std::uint64_t chain_seed(std::uint64_t seed, int chain);

/// A single chain. Exposures are standardized internally and visited in
/// name order, so a column permutation of the data permutes the trace.
McmcTrace run_chain(const Dataset& d, const BkmrConfig& cfg, std::uint64_t seed, int chain);

/// All chains of one run plus the Gelman-Rubin statistic of the log posterior.
McmcRun mcmc_run(const Dataset& d, const BkmrConfig& cfg, std::uint64_t seed);

}  // namespace seedsweep::bkmr
