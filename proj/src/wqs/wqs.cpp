#include "seedsweep/wqs/wqs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "seedsweep/core/error.hpp"
#include "seedsweep/core/transform.hpp"

namespace seedsweep::wqs {

namespace {

Eigen::VectorXd softmax(const Eigen::VectorXd& theta) {
    const Eigen::ArrayXd e = (theta.array() - theta.maxCoeff()).exp();
    return (e / e.sum()).matrix();
}

/// Sufficient statistics of one resample; every objective evaluation is
/// O(p² + c³) and never touches the rows again.
struct ProfiledLeastSquares {
    Eigen::MatrixXd QtQ, QtX, XtX;
    Eigen::VectorXd Qty, Xty;
    double yty = 0.0;
    double n = 0.0;

    struct Eval {
        double value = 0.0;      // RSS / (2n)
        Eigen::VectorXd grad;    // w.r.t. theta
        double index_beta = 0.0;
        bool ok = false;
    };

    Eval evaluate(const Eigen::VectorXd& theta) const {
        Eval out;
        const Eigen::VectorXd w = softmax(theta);
        const auto c = XtX.rows();
        Eigen::MatrixXd AtA(c + 1, c + 1);
        Eigen::VectorXd Aty(c + 1);
        const Eigen::VectorXd QtQw = QtQ * w;
        AtA(0, 0) = w.dot(QtQw);
        AtA.block(0, 1, 1, c) = (QtX.transpose() * w).transpose();
        AtA.block(1, 0, c, 1) = QtX.transpose() * w;
        AtA.bottomRightCorner(c, c) = XtX;
        Aty(0) = w.dot(Qty);
        Aty.tail(c) = Xty;
        const Eigen::LDLT<Eigen::MatrixXd> ldlt(AtA);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return out;
        const Eigen::VectorXd coef = ldlt.solve(Aty);
        if (!coef.allFinite()) return out;
        const double rss = std::max(0.0, yty - 2.0 * coef.dot(Aty) + coef.dot(AtA * coef));
        const double b1 = coef(0);
        // Qᵀr for the profiled residual r = y - b1 Q w - X g
        const Eigen::VectorXd Qtr = Qty - b1 * QtQw - QtX * coef.tail(c);
        const Eigen::VectorXd dw = (-b1 / n) * Qtr;  // d(RSS/2n)/dw
        out.value = rss / (2.0 * n);
        out.grad = (w.array() * (dw.array() - dw.dot(w))).matrix();
        out.index_beta = b1;
        out.ok = out.grad.allFinite() && std::isfinite(out.value);
        return out;
    }
};

struct BfgsResult {
    Eigen::VectorXd theta;
    double index_beta = 0.0;
    bool ok = false;
    bool converged = false;
};

BfgsResult minimize_bfgs(const ProfiledLeastSquares& problem, Eigen::Index dim, int max_iterations,
                         double gradient_tolerance) {
    BfgsResult out;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(dim);
    auto current = problem.evaluate(x);
    if (!current.ok) return out;
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(dim, dim);
    bool first_step = true;
    for (int it = 0; it < max_iterations; ++it) {
        if (current.grad.cwiseAbs().maxCoeff() < gradient_tolerance) {
            out.converged = true;
            break;
        }
        Eigen::VectorXd direction = -H * current.grad;
        double slope = direction.dot(current.grad);
        if (!(slope < 0.0)) {
            H.setIdentity();
            direction = -current.grad;
            slope = direction.dot(current.grad);
        }
        double step = 1.0;
        ProfiledLeastSquares::Eval trial;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            trial = problem.evaluate(x + step * direction);
            if (trial.ok && trial.value <= current.value + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // no further decrease available at this precision
        const Eigen::VectorXd s = step * direction;
        const Eigen::VectorXd yk = trial.grad - current.grad;
        x += s;
        current = std::move(trial);
        const double sy = s.dot(yk);
        if (sy > 1e-12) {
            if (first_step) {
                H *= sy / yk.squaredNorm();
                first_step = false;
            }
            const double rho = 1.0 / sy;
            const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(dim, dim);
            H = (I - rho * s * yk.transpose()) * H * (I - rho * yk * s.transpose()) + rho * s * s.transpose();
        }
    }
    if (!out.converged && current.grad.cwiseAbs().maxCoeff() < gradient_tolerance) out.converged = true;
    out.theta = x;
    out.index_beta = current.index_beta;
    out.ok = current.ok && x.allFinite();
    return out;
}

}  // namespace

void WqsConfig::validate(std::size_t p) const {
    if (q < 2) throw_usage("E_USAGE_WQS", "wqs quantile count must be at least 2");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw_usage("E_USAGE_WQS", "wqs train_fraction must lie in (0,1)");
    }
    if (n_bootstrap < 1) throw_usage("E_USAGE_WQS", "wqs n_bootstrap must be at least 1");
    if (max_iterations < 1) throw_usage("E_USAGE_WQS", "wqs max_iterations must be at least 1");
    const double t = tau_for(p == 0 ? 1 : p);
    if (!(t > 0.0 && t < 1.0) && p > 1) throw_usage("E_USAGE_WQS", "wqs tau must lie in (0,1)");
}

Split split_train_test(std::size_t n, double frac, Rng& rng) {
    if (!(frac > 0.0 && frac < 1.0)) throw_usage("E_USAGE_SPLIT", "train fraction must lie in (0,1)");
    const auto n_train = static_cast<std::size_t>(std::floor(frac * static_cast<double>(n)));
    if (n_train < 2 || n - n_train < 2) {
        throw_data("E_DATA_SPLIT", "degenerate train/test split (n=" + std::to_string(n) +
                                       ", train=" + std::to_string(n_train) + ")");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));
    Split out;
    out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

Eigen::MatrixXd quantile_scores(const Eigen::MatrixXd& Z, int q) {
    Eigen::MatrixXd Q(Z.rows(), Z.cols());
    for (Eigen::Index j = 0; j < Z.cols(); ++j) {
        const Eigen::VectorXd col = Z.col(j);
        const auto scores = quantile_bin(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())), q);
        for (Eigen::Index i = 0; i < Z.rows(); ++i) Q(i, j) = scores[static_cast<std::size_t>(i)];
    }
    return Q;
}

WeightEstimate estimate_weights(const Eigen::MatrixXd& Q, const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                const WqsConfig& config, Rng& rng) {
    const auto n = Q.rows();
    const auto p = Q.cols();
    if (y.size() != n || X.rows() != n) throw_usage("E_USAGE_SHAPE", "estimate_weights: row counts differ");
    if (n < p + X.cols() + 2) {
        throw_data("E_DATA_TOO_FEW_ROWS", "training rows must number at least p + c + 2");
    }
    WeightEstimate out;
    Eigen::MatrixXd Qb(n, p);
    Eigen::MatrixXd Xb(n, X.cols());
    Eigen::VectorXd yb(n);
    Eigen::VectorXd matching_sum = Eigen::VectorXd::Zero(p);
    Eigen::VectorXd all_sum = Eigen::VectorXd::Zero(p);
    for (int b = 0; b < config.n_bootstrap; ++b) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const auto src = static_cast<Eigen::Index>(rng.below(static_cast<std::size_t>(n)));
            Qb.row(i) = Q.row(src);
            Xb.row(i) = X.row(src);
            yb(i) = y(src);
        }
        ProfiledLeastSquares problem;
        problem.QtQ = Qb.transpose() * Qb;
        problem.QtX = Qb.transpose() * Xb;
        problem.XtX = Xb.transpose() * Xb;
        problem.Qty = Qb.transpose() * yb;
        problem.Xty = Xb.transpose() * yb;
        problem.yty = yb.squaredNorm();
        problem.n = static_cast<double>(n);

        const auto result = minimize_bfgs(problem, p, config.max_iterations, config.gradient_tolerance);
        if (!result.ok) {
            ++out.n_failed;
            continue;
        }
        if (!result.converged) ++out.n_nonconverged;
        const Eigen::VectorXd w = softmax(result.theta);
        out.bootstrap_weights.push_back(w);
        out.bootstrap_index_beta.push_back(result.index_beta);
        all_sum += w;
        const bool matches = config.direction == Direction::Positive ? result.index_beta > 0.0
                                                                     : result.index_beta < 0.0;
        if (matches) {
            matching_sum += w;
            ++out.n_matching;
        }
    }
    if (out.bootstrap_weights.empty()) {
        throw_model("E_MODEL_WQS_FAILED", "every bootstrap resample failed to optimize");
    }
    if (out.n_matching > 0) {
        out.weights = matching_sum / static_cast<double>(out.n_matching);
    } else {
        out.flagged = true;
        out.weights = all_sum / static_cast<double>(out.bootstrap_weights.size());
    }
    return out;
}

Eigen::VectorXd wqs_index(const Eigen::VectorXd& weights, const Eigen::MatrixXd& Q) {
    if (weights.size() != Q.cols()) {
        throw_usage("E_USAGE_SHAPE", "wqs_index: weight count " + std::to_string(weights.size()) +
                                         " does not match exposure count " + std::to_string(Q.cols()));
    }
    return Q * weights;
}

IndexRegression fit_index_regression(const Eigen::VectorXd& y, const Eigen::VectorXd& index,
                                     const Eigen::MatrixXd& X) {
    const auto n = y.size();
    if (index.size() != n || X.rows() != n) throw_usage("E_USAGE_SHAPE", "index regression: row counts differ");
    const auto k = X.cols() + 1;
    if (n < k + 1) throw_data("E_DATA_TOO_FEW_ROWS", "index regression needs more rows than parameters");
    Eigen::MatrixXd A(n, k);
    A.col(0) = index;
    A.rightCols(X.cols()) = X;
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < k) throw_model("E_MODEL_SINGULAR", "index regression design is singular");
    const Eigen::VectorXd coef = qr.solve(y);
    const double df = static_cast<double>(n - k);
    const double sigma2 = (y - A * coef).squaredNorm() / df;
    const Eigen::MatrixXd AtA = A.transpose() * A;
    const Eigen::VectorXd e0 = Eigen::VectorXd::Unit(k, 0);
    const double var = sigma2 * AtA.ldlt().solve(e0)(0);
    IndexRegression out;
    out.beta = coef(0);
    out.se = std::sqrt(std::max(0.0, var));
    out.ci95 = {out.beta - 1.96 * out.se, out.beta + 1.96 * out.se};
    out.residual_df = df;
    return out;
}

std::vector<std::size_t> important_components(const Eigen::VectorXd& weights, double tau) {
    std::vector<std::size_t> out;
    for (Eigen::Index j = 0; j < weights.size(); ++j) {
        if (weights(j) > tau) out.push_back(static_cast<std::size_t>(j));
    }
    return out;
}

WqsFit wqs_run(const Dataset& d, const WqsConfig& config, std::uint64_t seed) {
    config.validate(d.p());
    Rng rng(seed);
    const Eigen::MatrixXd Q = quantile_scores(d.Z, config.q);
    const Split split = split_train_test(d.n(), config.train_fraction, rng);

    auto rows_of = [](const auto& M, const std::vector<std::size_t>& idx) {
        using Mat = std::decay_t<decltype(M)>;
        Mat out(static_cast<Eigen::Index>(idx.size()), M.cols());
        for (std::size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = M.row(static_cast<Eigen::Index>(idx[i]));
        return out;
    };
    auto elems_of = [](const Eigen::VectorXd& v, const std::vector<std::size_t>& idx) {
        Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
        for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(static_cast<Eigen::Index>(idx[i]));
        return out;
    };

    const WeightEstimate est =
        estimate_weights(rows_of(Q, split.train), elems_of(d.y, split.train), rows_of(d.X, split.train), config, rng);
    const Eigen::MatrixXd Q_test = rows_of(Q, split.test);
    const IndexRegression reg =
        fit_index_regression(elems_of(d.y, split.test), wqs_index(est.weights, Q_test), rows_of(d.X, split.test));

    WqsFit fit;
    fit.weights = est.weights;
    fit.index_beta = reg.beta;
    fit.index_se = reg.se;
    fit.ci95 = reg.ci95;
    fit.residual_df = reg.residual_df;
    fit.train_indices = split.train;
    fit.test_indices = split.test;
    fit.seed = seed;
    fit.flagged = est.flagged;
    fit.n_matching = est.n_matching;
    fit.n_failed = est.n_failed;
    return fit;
}

}  // namespace seedsweep::wqs
