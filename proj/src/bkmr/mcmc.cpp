#include "seedsweep/bkmr/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "seedsweep/bkmr/diagnostics.hpp"
#include "seedsweep/core/error.hpp"
#include "seedsweep/core/rng.hpp"
#include "seedsweep/core/transform.hpp"

namespace seedsweep::bkmr {

void BkmrConfig::validate() const {
    if (n_iter < 2) throw_usage("E_USAGE_BKMR", "n_iter must be at least 2");
    if (burn() < 0 || burn() >= n_iter) throw_usage("E_USAGE_BKMR", "burn_in must lie in [0, n_iter)");
    if (n_chains < 1) throw_usage("E_USAGE_BKMR", "n_chains must be positive");
    if (!(r_proposal_sd > 0.0) || !(lam_proposal_sd > 0.0))
        throw_usage("E_USAGE_BKMR", "proposal standard deviations must be positive");
    if (grid_points < 2) throw_usage("E_USAGE_BKMR", "grid_points must be at least 2");
    if (thin < 1) throw_usage("E_USAGE_BKMR", "thin must be positive");
    if (!(jitter > 0.0) || jitter_attempts < 1) throw_usage("E_USAGE_BKMR", "invalid jitter policy");
    const auto& pr = priors;
    if (!(pr.sigma2_shape > 0.0) || !(pr.sigma2_scale > 0.0))
        throw_usage("E_USAGE_BKMR", "sigma2 prior parameters must be positive");
    if (!(pr.log_lam_min < pr.log_lam_max)) throw_usage("E_USAGE_BKMR", "empty log(lam) prior range");
    if (!(pr.r_shape > 0.0) || !(pr.r_rate > 0.0) || !(pr.r_max > 0.0))
        throw_usage("E_USAGE_BKMR", "r slab parameters must be positive");
    for (double pi : {pr.group_inclusion, pr.within_inclusion}) {
        if (!(pi > 0.0 && pi < 1.0)) throw_usage("E_USAGE_BKMR", "inclusion probabilities must lie in (0, 1)");
    }
}

std::uint64_t chain_seed(std::uint64_t seed, int chain) {
    std::uint64_t state = seed;
    std::uint64_t out = 0;
    for (int k = 0; k <= chain; ++k) out = splitmix64_next(state);
    return out;
}

namespace {

// half-width of the starting range for log(lam)
constexpr double kInitLogLam = 2.0;

struct Marginal {
    Eigen::LLT<Eigen::MatrixXd> v;  // I + lam K
    Eigen::LLT<Eigen::MatrixXd> m;  // X' V^-1 X
    Eigen::VectorXd beta_hat;
    double s = 0.0;  // generalized residual sum of squares
    double log_ml = 0.0;
};

class Chain {
public:
    Chain(const Dataset& d, const BkmrConfig& cfg, std::uint64_t stream_seed)
        : cfg_(cfg), pr_(cfg.priors), rng_(stream_seed) {
        if (d.n() > cfg.max_n)
            throw_data("E_DATA_TOO_LARGE",
                       "BKMR supports at most " + std::to_string(cfg.max_n) + " observations");
        n_ = static_cast<Eigen::Index>(d.n());
        p_ = d.p();
        c_ = d.c();
        if (n_ <= static_cast<Eigen::Index>(c_))
            throw_data("E_DATA_TOO_FEW_ROWS", "BKMR needs more observations than covariates");

        // canonical exposure order: by name; groups by name
        order_.resize(p_);
        std::iota(order_.begin(), order_.end(), std::size_t{0});
        std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
            return d.exposure_names[a] < d.exposure_names[b];
        });
        const std::size_t groups = d.groups.group_count();
        group_order_.resize(groups);
        std::iota(group_order_.begin(), group_order_.end(), std::size_t{0});
        std::stable_sort(group_order_.begin(), group_order_.end(), [&](std::size_t a, std::size_t b) {
            return d.groups.group_names[a] < d.groups.group_names[b];
        });
        std::vector<std::size_t> group_rank(groups);
        for (std::size_t g = 0; g < groups; ++g) group_rank[group_order_[g]] = g;
        group_of_.resize(p_);
        members_.assign(groups, {});
        for (std::size_t m = 0; m < p_; ++m) {
            group_of_[m] = group_rank[static_cast<std::size_t>(d.groups.assignments[order_[m]])];
            members_[group_of_[m]].push_back(m);
        }

        const Standardization st = standardize(d.Z, std::vector<bool>(p_, false));
        z_.resize(n_, static_cast<Eigen::Index>(p_));
        for (std::size_t m = 0; m < p_; ++m) z_.col(static_cast<Eigen::Index>(m)) = st.values.col(static_cast<Eigen::Index>(order_[m]));
        y_ = d.y;
        x_ = d.X;

        post_shape_ = pr_.sigma2_shape + 0.5 * static_cast<double>(n_ - static_cast<Eigen::Index>(c_));
        log_pi_g_ = std::log(pr_.group_inclusion);
        log_1m_pi_g_ = std::log1p(-pr_.group_inclusion);
        log_pi_w_ = std::log(pr_.within_inclusion);
        log_1m_pi_w_ = std::log1p(-pr_.within_inclusion);
        for (const auto& mem : members_) {
            const double all_off = std::pow(1.0 - pr_.within_inclusion, static_cast<double>(mem.size()));
            log_some_on_.push_back(std::log1p(-all_off));
        }

        k_cur_.resize(n_, n_);
        k_prop_.resize(n_, n_);
        v_work_.resize(n_, n_);
        dist_.resize(n_);
    }

    McmcTrace run() {
        McmcTrace trace;
        initialize();
        const int burn = cfg_.burn();
        trace.states.reserve(static_cast<std::size_t>(cfg_.n_iter - burn));
        trace.log_posterior.reserve(static_cast<std::size_t>(cfg_.n_iter - burn));
        for (int it = 0; it < cfg_.n_iter; ++it) {
            if (cfg_.selection == Selection::Hierarchical) toggle_move(trace.toggle_moves);
            if (cfg_.selection != Selection::None) {
                for (std::size_t m = 0; m < p_; ++m) {
                    if (r_(static_cast<Eigen::Index>(m)) > 0.0) r_move(m, trace.r_moves);
                }
            }
            lam_move(trace.lam_moves);
            gibbs();
            if (it >= burn) {
                trace.states.push_back(export_state());
                trace.log_posterior.push_back(cur_.log_ml + log_prior(r_, dg_, dw_));
            }
        }
        trace.jitter_retries = jitter_retries_;
        return trace;
    }

private:
    double draw_slab() {
        double r = 0.0;
        do {
            r = rng_.gamma(pr_.r_shape) / pr_.r_rate;
        } while (!(r > 0.0 && r < pr_.r_max));
        return r;
    }

    void initialize() {
        const std::size_t groups = members_.size();
        r_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p_));
        dg_.assign(groups, 0);
        dw_.assign(p_, 0);
        if (cfg_.selection == Selection::Hierarchical) {
            for (std::size_t g = 0; g < groups; ++g) {
                if (rng_.uniform01() >= pr_.group_inclusion) continue;
                dg_[g] = 1;
                bool any = false;
                while (!any) {
                    for (std::size_t m : members_[g]) {
                        dw_[m] = rng_.uniform01() < pr_.within_inclusion ? 1 : 0;
                        any = any || dw_[m];
                    }
                }
            }
        } else if (cfg_.selection == Selection::AllActive) {
            dg_.assign(groups, 1);
            dw_.assign(p_, 1);
        }
        for (std::size_t m = 0; m < p_; ++m) {
            if (dw_[m]) r_(static_cast<Eigen::Index>(m)) = draw_slab();
        }
        const double lo = std::max(pr_.log_lam_min, -kInitLogLam);
        const double hi = std::min(pr_.log_lam_max, kInitLogLam);
        lam_ = std::exp(lo + (hi - lo) * rng_.uniform01());

        fill_kernel(r_, k_cur_);
        evaluate(k_cur_, lam_, cur_);
        gibbs();
    }

    // lower triangle of K(r), unit diagonal
    void fill_kernel(const Eigen::VectorXd& r, Eigen::MatrixXd& k) {
        for (Eigen::Index b = 0; b < n_; ++b) {
            const Eigen::Index len = n_ - b;
            auto dist = dist_.head(len);
            dist.setZero();
            for (Eigen::Index m = 0; m < r.size(); ++m) {
                if (r(m) == 0.0) continue;
                dist += r(m) * (z_.col(m).tail(len).array() - z_(b, m)).square();
            }
            k.col(b).tail(len) = (-dist).exp().matrix();
        }
    }

    void evaluate(const Eigen::MatrixXd& k, double lam, Marginal& out) {
        for (Eigen::Index b = 0; b < n_; ++b) v_work_.col(b).tail(n_ - b) = lam * k.col(b).tail(n_ - b);
        v_work_.diagonal().array() += 1.0;
        out.v.compute(v_work_);
        double jitter = cfg_.jitter;
        for (int attempt = 0; out.v.info() != Eigen::Success; ++attempt) {
            if (attempt == cfg_.jitter_attempts)
                throw_model("E_MODEL_CHOLESKY", "kernel matrix is not positive definite after jitter");
            v_work_.diagonal().array() += jitter;
            jitter *= 10.0;
            ++jitter_retries_;
            out.v.compute(v_work_);
        }
        const auto l = out.v.matrixL();
        const Eigen::VectorXd ty = l.solve(y_);
        const Eigen::MatrixXd tx = l.solve(x_);
        const Eigen::VectorXd xty = tx.transpose() * ty;
        out.m.compute(tx.transpose() * tx);
        if (out.m.info() != Eigen::Success)
            throw_model("E_MODEL_COLLINEAR", "covariate matrix is rank deficient");
        out.beta_hat = out.m.solve(xty);
        out.s = std::max(ty.squaredNorm() - xty.dot(out.beta_hat), 0.0);

        const double half_logdet_v = out.v.matrixLLT().diagonal().array().log().sum();
        const double half_logdet_m = out.m.matrixLLT().diagonal().array().log().sum();
        out.log_ml = -half_logdet_v - half_logdet_m - post_shape_ * std::log(pr_.sigma2_scale + 0.5 * out.s);
    }

    double log_indicator_prior(const std::vector<std::uint8_t>& dg, const std::vector<std::uint8_t>& dw) const {
        double lp = 0.0;
        for (std::size_t g = 0; g < members_.size(); ++g) {
            if (!dg[g]) {
                lp += log_1m_pi_g_;
                continue;
            }
            lp += log_pi_g_ - log_some_on_[g];
            for (std::size_t m : members_[g]) lp += dw[m] ? log_pi_w_ : log_1m_pi_w_;
        }
        return lp;
    }

    double log_slab(double r) const { return (pr_.r_shape - 1.0) * std::log(r) - pr_.r_rate * r; }

    double log_prior(const Eigen::VectorXd& r, const std::vector<std::uint8_t>& dg,
                     const std::vector<std::uint8_t>& dw) const {
        double lp = 0.0;
        if (cfg_.selection == Selection::Hierarchical) lp += log_indicator_prior(dg, dw);
        for (Eigen::Index m = 0; m < r.size(); ++m) {
            if (r(m) > 0.0) lp += log_slab(r(m));
        }
        return lp;
    }

    bool accept(double log_alpha) { return std::log(rng_.uniform01()) < log_alpha; }

    // Flip one within-group indicator. A newly active r is drawn from its
    // slab prior, so the slab density cancels from the acceptance ratio.
    void toggle_move(AcceptanceCounts& counts) {
        const std::size_t m = rng_.below(p_);
        const std::size_t g = group_of_[m];
        const auto mi = static_cast<Eigen::Index>(m);
        Eigen::VectorXd r = r_;
        auto dg = dg_;
        auto dw = dw_;
        if (!dw[m]) {
            r(mi) = draw_slab();
            dw[m] = 1;
            dg[g] = 1;
        } else {
            r(mi) = 0.0;
            dw[m] = 0;
            dg[g] = std::any_of(members_[g].begin(), members_[g].end(), [&](std::size_t k) { return dw[k] != 0; });
        }
        ++counts.proposed;
        fill_kernel(r, k_prop_);
        evaluate(k_prop_, lam_, prop_);
        const double log_alpha =
            prop_.log_ml - cur_.log_ml + log_indicator_prior(dg, dw) - log_indicator_prior(dg_, dw_);
        if (accept(log_alpha)) {
            ++counts.accepted;
            r_ = std::move(r);
            dg_ = std::move(dg);
            dw_ = std::move(dw);
            std::swap(k_cur_, k_prop_);
            std::swap(cur_, prop_);
        }
    }

    void r_move(std::size_t m, AcceptanceCounts& counts) {
        const auto mi = static_cast<Eigen::Index>(m);
        const double old_log = std::log(r_(mi));
        const double new_log = old_log + cfg_.r_proposal_sd * rng_.normal();
        const double proposal = std::exp(new_log);
        ++counts.proposed;
        if (!(proposal > 0.0 && proposal < pr_.r_max)) return;
        Eigen::VectorXd r = r_;
        r(mi) = proposal;
        fill_kernel(r, k_prop_);
        evaluate(k_prop_, lam_, prop_);
        // random walk on log r: Jacobian r'/r
        const double log_alpha =
            prop_.log_ml - cur_.log_ml + log_slab(proposal) - log_slab(r_(mi)) + (new_log - old_log);
        if (accept(log_alpha)) {
            ++counts.accepted;
            r_ = std::move(r);
            std::swap(k_cur_, k_prop_);
            std::swap(cur_, prop_);
        }
    }

    void lam_move(AcceptanceCounts& counts) {
        const double new_log = std::log(lam_) + cfg_.lam_proposal_sd * rng_.normal();
        ++counts.proposed;
        if (new_log < pr_.log_lam_min || new_log > pr_.log_lam_max) return;
        const double lam = std::exp(new_log);
        evaluate(k_cur_, lam, prop_);
        if (accept(prop_.log_ml - cur_.log_ml)) {
            ++counts.accepted;
            lam_ = lam;
            std::swap(cur_, prop_);
        }
    }

    // sigma2 and beta from their full conditionals given (lam, r)
    void gibbs() {
        sigma2_ = (pr_.sigma2_scale + 0.5 * cur_.s) / rng_.gamma(post_shape_);
        Eigen::VectorXd z(static_cast<Eigen::Index>(c_));
        for (Eigen::Index j = 0; j < z.size(); ++j) z(j) = rng_.normal();
        beta_ = cur_.beta_hat + std::sqrt(sigma2_) * cur_.m.matrixU().solve(z);
    }

    McmcState export_state() const {
        McmcState s;
        s.beta = beta_;
        s.sigma2 = sigma2_;
        s.lam = lam_;
        s.r = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p_));
        s.delta_within.assign(p_, 0);
        s.delta_group.assign(members_.size(), 0);
        for (std::size_t m = 0; m < p_; ++m) {
            s.r(static_cast<Eigen::Index>(order_[m])) = r_(static_cast<Eigen::Index>(m));
            s.delta_within[order_[m]] = dw_[m];
        }
        for (std::size_t g = 0; g < members_.size(); ++g) s.delta_group[group_order_[g]] = dg_[g];
        return s;
    }

    const BkmrConfig& cfg_;
    const BkmrPriors& pr_;
    Rng rng_;
    Eigen::Index n_ = 0;
    std::size_t p_ = 0;
    std::size_t c_ = 0;
    std::vector<std::size_t> order_;        // canonical -> dataset exposure
    std::vector<std::size_t> group_order_;  // canonical -> dataset group
    std::vector<std::size_t> group_of_;     // canonical exposure -> canonical group
    std::vector<std::vector<std::size_t>> members_;
    Eigen::MatrixXd z_;
    Eigen::VectorXd y_;
    Eigen::MatrixXd x_;

    double post_shape_ = 0.0;
    double log_pi_g_ = 0.0, log_1m_pi_g_ = 0.0, log_pi_w_ = 0.0, log_1m_pi_w_ = 0.0;
    std::vector<double> log_some_on_;

    Eigen::MatrixXd k_cur_, k_prop_, v_work_;
    Eigen::ArrayXd dist_;
    Marginal cur_, prop_;
    int jitter_retries_ = 0;

    double lam_ = 1.0;
    double sigma2_ = 1.0;
    Eigen::VectorXd beta_;
    Eigen::VectorXd r_;
    std::vector<std::uint8_t> dg_, dw_;
};

}  // namespace

McmcTrace run_chain(const Dataset& d, const BkmrConfig& cfg, std::uint64_t seed, int chain) {
    cfg.validate();
    d.validate();
    const std::uint64_t stream = chain_seed(seed, chain);
    Chain runner(d, cfg, stream);
    McmcTrace trace = runner.run();
    trace.chain = chain;
    trace.seed = seed;
    trace.chain_seed = stream;
    return trace;
}

McmcRun mcmc_run(const Dataset& d, const BkmrConfig& cfg, std::uint64_t seed) {
    McmcRun run;
    for (int k = 0; k < cfg.n_chains; ++k) run.chains.push_back(run_chain(d, cfg, seed, k));
    if (run.chains.size() >= 2 && run.chains.front().log_posterior.size() >= 2) {
        std::vector<std::vector<double>> lp;
        for (const auto& c : run.chains) lp.push_back(c.log_posterior);
        try {
            run.rhat = gelman_rubin(lp);
        } catch (const Error&) {
            run.rhat = std::numeric_limits<double>::infinity();
        }
        run.rhat_flag = !(run.rhat < cfg.rhat_threshold);
    } else {
        run.rhat = std::numeric_limits<double>::quiet_NaN();
    }
    return run;
}

}  // namespace seedsweep::bkmr
