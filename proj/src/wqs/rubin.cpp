#include "seedsweep/wqs/rubin.hpp"

#include <cmath>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "seedsweep/core/error.hpp"

namespace seedsweep::wqs {

double t_quantile_975(double df) {
    if (std::isinf(df)) return boost::math::quantile(boost::math::normal_distribution<double>(), 0.975);
    if (!(df > 0.0)) throw_model("E_MODEL_DF", "degrees of freedom must be positive");
    return boost::math::quantile(boost::math::students_t_distribution<double>(df), 0.975);
}

PooledEstimate rubins_pool(std::span<const double> estimates, std::span<const double> variances,
                           double complete_df) {
    const std::size_t m = estimates.size();
    if (m < 2) throw_model("E_MODEL_POOL", "pooling requires at least two seeds");
    if (variances.size() != m) throw_usage("E_USAGE_POOL", "estimate and variance counts differ");
    for (double v : variances) {
        if (!(v >= 0.0)) throw_model("E_MODEL_POOL", "pooling requires non-negative variances");
    }
    const double md = static_cast<double>(m);
    PooledEstimate out;
    out.m = m;
    for (std::size_t i = 0; i < m; ++i) {
        out.estimate += estimates[i];
        out.within_var += variances[i];
    }
    out.estimate /= md;
    out.within_var /= md;
    for (double e : estimates) out.between_var += (e - out.estimate) * (e - out.estimate);
    out.between_var /= md - 1.0;
    const double inflated_between = (1.0 + 1.0 / md) * out.between_var;
    out.total_var = out.within_var + inflated_between;

    // fraction of variance due to between-run variability
    const double gamma = out.total_var > 0.0 ? inflated_between / out.total_var : 0.0;
    const double inf = std::numeric_limits<double>::infinity();
    const double df_old = gamma > 0.0 ? (md - 1.0) / (gamma * gamma) : inf;
    const double df_obs =
        std::isinf(complete_df) ? inf : (complete_df + 1.0) / (complete_df + 3.0) * complete_df * (1.0 - gamma);
    if (!(df_obs > 0.0)) {
        // no within-run variance at all: only the between-run df is informative
        out.df = df_old;
    } else if (std::isinf(df_old) && std::isinf(df_obs)) {
        out.df = inf;
    } else if (std::isinf(df_old)) {
        out.df = df_obs;
    } else if (std::isinf(df_obs)) {
        out.df = df_old;
    } else {
        out.df = 1.0 / (1.0 / df_old + 1.0 / df_obs);
    }
    const double half = t_quantile_975(out.df) * std::sqrt(out.total_var);
    out.ci95 = {out.estimate - half, out.estimate + half};
    return out;
}

}  // namespace seedsweep::wqs
