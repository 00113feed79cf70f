#include "seedsweep/sweep/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <set>
#include <thread>

#include "seedsweep/core/error.hpp"
#include "seedsweep/core/rng.hpp"
#include "seedsweep/penalized/cross_validation.hpp"
#include "seedsweep/penalized/group_lasso.hpp"
#include "seedsweep/penalized/lasso.hpp"

namespace seedsweep::sweep {

std::string model_name(Model m) {
    switch (m) {
        case Model::Lasso: return "lasso";
        case Model::GroupLasso: return "group_lasso";
        case Model::Wqs: return "wqs";
        case Model::Bkmr: return "bkmr";
    }
    return "unknown";
}

Model parse_model(const std::string& name) {
    if (name == "lasso") return Model::Lasso;
    if (name == "group_lasso") return Model::GroupLasso;
    if (name == "wqs") return Model::Wqs;
    if (name == "bkmr") return Model::Bkmr;
    throw_usage("E_USAGE_MODEL", "unknown model '" + name + "' (expected lasso, group_lasso, wqs or bkmr)");
}

std::vector<std::uint64_t> SweepConfig::default_seeds() {
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t s = 1; s <= 100; ++s) seeds.push_back(s);
    return seeds;
}

void SweepConfig::validate(const Dataset& d) const {
    if (seeds.empty()) throw_usage("E_USAGE_SEEDS", "seed list is empty");
    std::set<std::uint64_t> seen;
    for (auto s : seeds) {
        if (!seen.insert(s).second) throw_usage("E_USAGE_SEEDS", "duplicate seed " + std::to_string(s));
    }
    if (jobs < 1) throw_usage("E_USAGE_JOBS", "jobs must be at least 1");
    switch (model) {
        case Model::Lasso:
        case Model::GroupLasso:
            if (penalized.folds < 2) throw_usage("E_USAGE_FOLDS", "folds must be at least 2");
            if (penalized.lambda_count < 1) throw_usage("E_USAGE_LAMBDA", "lambda_count must be positive");
            if (!(penalized.lambda_min_ratio > 0.0 && penalized.lambda_min_ratio < 1.0))
                throw_usage("E_USAGE_LAMBDA", "lambda_min_ratio must lie in (0, 1)");
            if (model == Model::GroupLasso) penalized::require_grouped_penalty(d);
            break;
        case Model::Wqs: wqs.validate(d.p()); break;
        case Model::Bkmr:
            bkmr.mcmc.validate();
            if (d.n() > bkmr.mcmc.max_n)
                throw_data("E_DATA_TOO_LARGE",
                           "BKMR supports at most " + std::to_string(bkmr.mcmc.max_n) + " observations");
            for (double pi : bkmr.mixture_percentiles) {
                if (!(pi > 0.0 && pi < 1.0)) throw_usage("E_USAGE_PERCENTILE", "percentiles must lie in (0, 1)");
            }
            break;
    }
}

SweepLabels SweepLabels::from(const Dataset& d) {
    return {d.exposure_names, d.covariate_names, d.groups.group_names, d.groups.assignments, d.penalty_mask};
}

std::size_t SweepResult::success_count() const {
    return static_cast<std::size_t>(std::count_if(results.begin(), results.end(), [](const SeedResult& r) { return r.ok; }));
}

namespace {

std::size_t count_retained(const Eigen::VectorXd& beta, const std::vector<bool>& mask) {
    std::size_t k = 0;
    for (Eigen::Index j = 0; j < beta.size(); ++j) {
        if (mask[static_cast<std::size_t>(j)] && beta(j) != 0.0) ++k;
    }
    return k;
}

PenalizedSeedResult run_penalized(const Dataset& d, const SweepConfig& cfg, std::uint64_t seed) {
    const auto& ps = cfg.penalized;
    const bool grouped = cfg.model == Model::GroupLasso;
    const double lmax = grouped ? penalized::group_lambda_max(d, ps.fit) : penalized::lambda_max(d, ps.fit);
    const auto grid = penalized::make_lambda_grid(lmax, ps.lambda_count, ps.lambda_min_ratio);
    Rng rng(seed);
    penalized::CvOptions opts;
    opts.one_se_rule = ps.one_se_rule;
    opts.fit = ps.fit;
    const auto curve = grouped ? penalized::cv_group_lasso(d, ps.folds, grid, rng, opts)
                               : penalized::cv_lasso(d, ps.folds, grid, rng, opts);

    PenalizedSeedResult out;
    out.lambda = curve.chosen_lambda;
    out.lambda_index = curve.chosen_index;
    out.lambda_grid = curve.grid.values;
    out.cv_mean = curve.mean_error;
    out.cv_se = curve.se_error;
    if (grouped) {
        const auto fit = penalized::group_lasso_fit(d, curve.chosen_lambda, std::nullopt, ps.fit);
        out.beta = fit.beta;
        out.group_norms = fit.group_norms;
        out.converged = fit.converged;
    } else {
        const auto fit = penalized::lasso_fit(d, curve.chosen_lambda, std::nullopt, ps.fit);
        out.beta = fit.beta;
        out.converged = fit.converged;
    }
    out.retained = count_retained(out.beta, d.penalty_mask);
    return out;
}

BkmrSeedResult run_bkmr(const Dataset& d, const SweepConfig& cfg, std::uint64_t seed) {
    const auto run = bkmr::mcmc_run(d, cfg.bkmr.mcmc, seed);
    BkmrSeedResult out;
    out.pips = bkmr::compute_pips(run.chains, d.groups);
    out.rhat = run.rhat;
    out.rhat_flag = run.rhat_flag;
    bkmr::AcceptanceCounts lam, r, toggle;
    for (const auto& c : run.chains) {
        lam.proposed += c.lam_moves.proposed;
        lam.accepted += c.lam_moves.accepted;
        r.proposed += c.r_moves.proposed;
        r.accepted += c.r_moves.accepted;
        toggle.proposed += c.toggle_moves.proposed;
        toggle.accepted += c.toggle_moves.accepted;
    }
    out.lam_acceptance = lam.rate();
    out.r_acceptance = r.rate();
    out.toggle_acceptance = toggle.rate();
    if (cfg.bkmr.curves) {
        const bkmr::HPredictor predictor(d, run.chains, cfg.bkmr.mcmc);
        for (std::size_t m = 0; m < d.p(); ++m)
            out.curves.push_back(bkmr::univariate_hresponse(predictor, d, m, cfg.bkmr.mcmc.grid_points));
        out.mixture = bkmr::overall_mixture_effect(predictor, d, cfg.bkmr.mixture_percentiles);
    }
    return out;
}

}  // namespace

SeedResult run_seed(const Dataset& d, const SweepConfig& cfg, std::uint64_t seed) {
    SeedResult r;
    r.seed = seed;
    switch (cfg.model) {
        case Model::Lasso:
        case Model::GroupLasso: r.penalized = run_penalized(d, cfg, seed); break;
        case Model::Wqs: r.wqs = wqs::wqs_run(d, cfg.wqs, seed); break;
        case Model::Bkmr: r.bkmr = run_bkmr(d, cfg, seed); break;
    }
    r.ok = true;
    return r;
}

SweepResult run_sweep(const Dataset& d, const SweepConfig& cfg) {
    d.validate();
    cfg.validate(d);

    std::vector<std::uint64_t> seeds = cfg.seeds;
    std::sort(seeds.begin(), seeds.end());

    SweepResult out;
    out.model = cfg.model;
    out.labels = SweepLabels::from(d);
    out.tau = cfg.wqs.tau_for(d.p());
    out.results.resize(seeds.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < seeds.size(); i = next++) {
            SeedResult& slot = out.results[i];
            try {
                slot = run_seed(d, cfg, seeds[i]);
            } catch (const Error& e) {
                slot = SeedResult{};
                slot.error_code = e.code();
                slot.error_message = e.what();
            } catch (const std::exception& e) {
                slot = SeedResult{};
                slot.error_code = "E_MODEL_INTERNAL";
                slot.error_message = e.what();
            }
            slot.seed = seeds[i];
        }
    };
    const auto width = std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), seeds.size());
    if (width <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < width; ++t) pool.emplace_back(worker);
    }

    if (out.success_count() == 0) {
        const auto& first = out.results.front();
        throw_model("E_MODEL_ALL_SEEDS_FAILED",
                    "every seed failed; first failure (seed " + std::to_string(first.seed) + "): " + first.error_message);
    }
    return out;
}

}  // namespace seedsweep::sweep
