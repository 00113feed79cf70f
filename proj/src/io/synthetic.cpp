#include "seedsweep/io/synthetic.hpp"

#include <cmath>

#include "seedsweep/core/error.hpp"
#include "seedsweep/core/rng.hpp"

namespace seedsweep::io {

std::string truth_name(Truth t) {
    switch (t) {
        case Truth::Null: return "null";
        case Truth::Linear: return "linear";
        case Truth::QuadraticSingle: return "quadratic-single";
    }
    return "unknown";
}

Truth parse_truth(const std::string& name) {
    if (name == "null") return Truth::Null;
    if (name == "linear") return Truth::Linear;
    if (name == "quadratic-single") return Truth::QuadraticSingle;
    throw_usage("E_USAGE_TRUTH", "unknown truth '" + name + "' (expected null, linear or quadratic-single)");
}

Eigen::MatrixXd SyntheticSpec::correlation_matrix() const {
    if (correlation) return *correlation;
    const auto k = static_cast<Eigen::Index>(p);
    Eigen::MatrixXd r = Eigen::MatrixXd::Constant(k, k, rho);
    r.diagonal().setOnes();
    return r;
}

void SyntheticSpec::validate() const {
    if (n < 2) throw_usage("E_USAGE_SYNTHETIC", "n must be at least 2");
    if (p < 1) throw_usage("E_USAGE_SYNTHETIC", "p must be at least 1");
    if (groups < 1 || groups > p) throw_usage("E_USAGE_SYNTHETIC", "groups must lie in [1, p]");
    if (!(noise_sd >= 0.0)) throw_usage("E_USAGE_SYNTHETIC", "noise_sd must be non-negative");
    if (!beta.empty() && beta.size() != p)
        throw_usage("E_USAGE_SYNTHETIC", "beta has " + std::to_string(beta.size()) + " entries, expected " + std::to_string(p));
    if (correlation) {
        const auto& c = *correlation;
        if (c.rows() != static_cast<Eigen::Index>(p) || c.cols() != static_cast<Eigen::Index>(p))
            throw_usage("E_USAGE_CORRELATION", "correlation matrix must be p x p");
        if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-12)
            throw_usage("E_USAGE_CORRELATION", "correlation matrix is not symmetric");
    } else {
        const double lower = p > 1 ? -1.0 / static_cast<double>(p - 1) : -1.0;
        if (!(rho > lower && rho < 1.0))
            throw_usage("E_USAGE_CORRELATION", "exchangeable correlation must lie in (-1/(p-1), 1)");
    }
    if (Eigen::LLT<Eigen::MatrixXd>(correlation_matrix()).info() != Eigen::Success)
        throw_usage("E_USAGE_CORRELATION", "correlation matrix is not positive definite");
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const auto n = static_cast<Eigen::Index>(spec.n);
    const auto p = static_cast<Eigen::Index>(spec.p);
    const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(spec.correlation_matrix()).matrixL();
    Rng rng(spec.seed);

    Dataset d;
    d.Z.resize(n, p);
    Eigen::VectorXd e(p);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index m = 0; m < p; ++m) e(m) = rng.normal();
        d.Z.row(i) = (chol * e).transpose();
    }
    d.X.resize(n, 3);
    d.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double cont = rng.normal();
        const double bin = rng.uniform01() < 0.5 ? 1.0 : 0.0;
        const double noise = rng.normal();
        double h = 0.0;
        switch (spec.truth) {
            case Truth::Null: break;
            case Truth::Linear:
                for (std::size_t m = 0; m < spec.beta.size(); ++m) h += spec.beta[m] * d.Z(i, static_cast<Eigen::Index>(m));
                break;
            case Truth::QuadraticSingle: h = spec.quadratic_coefficient * d.Z(i, 0) * d.Z(i, 0); break;
        }
        d.X(i, 0) = 1.0;
        d.X(i, 1) = cont;
        d.X(i, 2) = bin;
        d.y(i) = h + SyntheticSpec::kContinuousEffect * cont + SyntheticSpec::kBinaryEffect * bin + spec.noise_sd * noise;
    }

    for (std::size_t m = 0; m < spec.p; ++m) d.exposure_names.push_back("z" + std::to_string(m + 1));
    d.covariate_names = {"intercept", "x_cont", "x_bin"};
    d.penalty_mask = default_penalty_mask(d.p(), d.c());
    for (std::size_t g = 0; g < spec.groups; ++g) d.groups.group_names.push_back("g" + std::to_string(g + 1));
    for (std::size_t m = 0; m < spec.p; ++m) d.groups.assignments.push_back(static_cast<int>(m * spec.groups / spec.p));
    d.validate();
    return d;
}

}  // namespace seedsweep::io
