#include "seedsweep/bkmr/posterior.hpp"

#include "seedsweep/bkmr/kernel.hpp"
#include "seedsweep/core/error.hpp"
#include "seedsweep/core/stats.hpp"
#include "seedsweep/core/transform.hpp"

namespace seedsweep::bkmr {

PipTable compute_pips(std::span<const McmcTrace> traces, const GroupSpec& groups) {
    const std::size_t n_groups = groups.group_count();
    const std::size_t p = groups.assignments.size();
    std::vector<std::size_t> group_on(n_groups, 0);
    std::vector<std::size_t> member_on(p, 0);
    std::size_t total = 0;
    for (const auto& trace : traces) {
        for (const auto& s : trace.states) {
            if (s.delta_group.size() != n_groups || s.delta_within.size() != p)
                throw_usage("E_USAGE_SHAPE", "trace does not match the group specification");
            ++total;
            for (std::size_t g = 0; g < n_groups; ++g) group_on[g] += s.delta_group[g];
            for (std::size_t m = 0; m < p; ++m) {
                const auto g = static_cast<std::size_t>(groups.assignments[m]);
                if (s.delta_group[g] && s.delta_within[m]) ++member_on[m];
            }
        }
    }
    if (total == 0) throw_usage("E_USAGE_EMPTY_TRACE", "PIPs need at least one retained iteration");

    PipTable table;
    table.group_never_active.assign(n_groups, false);
    for (std::size_t g = 0; g < n_groups; ++g) {
        table.group_pips.push_back(static_cast<double>(group_on[g]) / static_cast<double>(total));
        table.group_never_active[g] = group_on[g] == 0;
    }
    for (std::size_t m = 0; m < p; ++m) {
        const std::size_t on = group_on[static_cast<std::size_t>(groups.assignments[m])];
        table.conditional_pips.push_back(on ? static_cast<double>(member_on[m]) / static_cast<double>(on) : 0.0);
    }
    return table;
}

HPredictor::HPredictor(const Dataset& d, std::span<const McmcTrace> traces, const BkmrConfig& cfg) {
    const Standardization st = standardize(d.Z, std::vector<bool>(d.p(), false));
    z_ = st.values;
    means_ = st.means;
    sds_ = st.sds;
    const auto thin = static_cast<std::size_t>(cfg.thin);
    for (const auto& trace : traces) {
        for (std::size_t i = 0; i < trace.states.size(); i += thin) {
            const McmcState& s = trace.states[i];
            Eigen::MatrixXd v = s.lam * gaussian_kernel(z_, s.r);
            v.diagonal().array() += 1.0;
            Eigen::LLT<Eigen::MatrixXd> llt(v);
            double jitter = cfg.jitter;
            for (int attempt = 0; llt.info() != Eigen::Success; ++attempt) {
                if (attempt == cfg.jitter_attempts)
                    throw_model("E_MODEL_CHOLESKY", "kernel matrix is not positive definite after jitter");
                v.diagonal().array() += jitter;
                jitter *= 10.0;
                llt.compute(v);
            }
            if (s.beta.size() != d.X.cols()) throw_usage("E_USAGE_SHAPE", "trace does not match the dataset");
            const Eigen::VectorXd resid = d.y - d.X * s.beta;
            alpha_.push_back(s.lam * llt.solve(resid));
            r_.push_back(s.r);
        }
    }
    if (alpha_.empty()) throw_usage("E_USAGE_EMPTY_TRACE", "exposure-response summaries need a non-empty trace");
}

Eigen::MatrixXd HPredictor::draws(const Eigen::MatrixXd& Zq) const {
    if (Zq.cols() != z_.cols()) throw_usage("E_USAGE_SHAPE", "query exposure count does not match the dataset");
    Eigen::MatrixXd zq = Zq;
    for (Eigen::Index m = 0; m < zq.cols(); ++m) zq.col(m) = (zq.col(m).array() - means_(m)) / sds_(m);
    Eigen::MatrixXd out(static_cast<Eigen::Index>(alpha_.size()), zq.rows());
    for (std::size_t k = 0; k < alpha_.size(); ++k) {
        out.row(static_cast<Eigen::Index>(k)) = (gaussian_cross_kernel(zq, z_, r_[k]) * alpha_[k]).transpose();
    }
    return out;
}

namespace {

std::vector<double> column(const Eigen::MatrixXd& M, Eigen::Index j) {
    return {M.col(j).data(), M.col(j).data() + M.rows()};
}

Eigen::RowVectorXd exposure_quantiles(const Dataset& d, double prob) {
    Eigen::RowVectorXd out(d.Z.cols());
    for (Eigen::Index m = 0; m < d.Z.cols(); ++m) out(m) = quantile(column(d.Z, m), prob);
    return out;
}

void summarize(const std::vector<double>& values, double& mean_out, double& lower, double& upper) {
    mean_out = mean(values);
    lower = quantile(values, 0.025);
    upper = quantile(values, 0.975);
}

}  // namespace

ExposureResponse univariate_hresponse(const HPredictor& predictor, const Dataset& d, std::size_t m, int grid_points) {
    if (m >= d.p()) throw_usage("E_USAGE_EXPOSURE", "exposure index out of range");
    if (grid_points < 2) throw_usage("E_USAGE_GRID", "grid_points must be at least 2");
    const auto mi = static_cast<Eigen::Index>(m);
    const std::vector<double> x = column(d.Z, mi);
    const double lo = quantile(x, 0.05);
    const double hi = quantile(x, 0.95);

    ExposureResponse out;
    out.exposure = m;
    const Eigen::RowVectorXd medians = exposure_quantiles(d, 0.5);
    Eigen::MatrixXd queries(grid_points, d.Z.cols());
    for (int i = 0; i < grid_points; ++i) {
        const double v = i + 1 == grid_points ? hi : lo + (hi - lo) * i / (grid_points - 1);
        out.grid.push_back(v);
        queries.row(i) = medians;
        queries(i, mi) = v;
    }
    const Eigen::MatrixXd h = predictor.draws(queries);
    for (int i = 0; i < grid_points; ++i) {
        double mu = 0.0, lower = 0.0, upper = 0.0;
        summarize(column(h, i), mu, lower, upper);
        out.mean.push_back(mu);
        out.lower.push_back(lower);
        out.upper.push_back(upper);
    }
    return out;
}

ExposureResponse univariate_hresponse(std::span<const McmcTrace> traces, const Dataset& d, std::size_t m,
                                      const BkmrConfig& cfg) {
    return univariate_hresponse(HPredictor(d, traces, cfg), d, m, cfg.grid_points);
}

std::vector<MixtureEffect> overall_mixture_effect(const HPredictor& predictor, const Dataset& d,
                                                  std::span<const double> percentiles) {
    for (double pi : percentiles) {
        if (!(pi > 0.0 && pi < 1.0)) throw_usage("E_USAGE_PERCENTILE", "percentiles must lie in (0, 1)");
    }
    const auto k = static_cast<Eigen::Index>(percentiles.size());
    Eigen::MatrixXd queries(k + 1, d.Z.cols());
    queries.row(0) = exposure_quantiles(d, 0.5);
    for (Eigen::Index i = 0; i < k; ++i) queries.row(i + 1) = exposure_quantiles(d, percentiles[static_cast<std::size_t>(i)]);
    const Eigen::MatrixXd h = predictor.draws(queries);

    std::vector<MixtureEffect> out;
    for (Eigen::Index i = 0; i < k; ++i) {
        const Eigen::VectorXd diff = h.col(i + 1) - h.col(0);
        MixtureEffect e;
        e.percentile = percentiles[static_cast<std::size_t>(i)];
        summarize(std::vector<double>(diff.data(), diff.data() + diff.size()), e.mean, e.lower, e.upper);
        out.push_back(e);
    }
    return out;
}

std::vector<MixtureEffect> overall_mixture_effect(std::span<const McmcTrace> traces, const Dataset& d,
                                                  std::span<const double> percentiles, const BkmrConfig& cfg) {
    return overall_mixture_effect(HPredictor(d, traces, cfg), d, percentiles);
}

}  // namespace seedsweep::bkmr
