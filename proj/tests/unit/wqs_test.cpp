#include <doctest.h>

#include <cmath>
#include <set>

#include "../support.hpp"
#include "seedsweep/core/error.hpp"
#include "seedsweep/io/synthetic.hpp"
#include "seedsweep/wqs/rubin.hpp"
#include "seedsweep/wqs/wqs.hpp"

using namespace seedsweep;
using namespace seedsweep::wqs;

namespace {

Dataset mixture_data(std::uint64_t seed, double effect) {
    io::SyntheticSpec spec;
    spec.n = 300;
    spec.p = 5;
    spec.groups = 1;
    spec.truth = io::Truth::Linear;
    spec.beta = {effect, 0.0, 0.0, 0.0, 0.0};
    spec.seed = seed;
    return io::generate_synthetic(spec);
}

}  // namespace

TEST_CASE("train/test split is a seeded partition") {
    Rng a(3), b(3);
    const auto s = split_train_test(100, 0.4, a);
    CHECK(s.train.size() == 40);
    CHECK(s.test.size() == 60);
    std::set<std::size_t> all(s.train.begin(), s.train.end());
    all.insert(s.test.begin(), s.test.end());
    CHECK(all.size() == 100);
    CHECK(std::is_sorted(s.train.begin(), s.train.end()));
    const auto t = split_train_test(100, 0.4, b);
    CHECK(t.train == s.train);
    Rng c(1);
    CHECK_THROWS_AS(split_train_test(4, 0.4, c), Error);
}

TEST_CASE("quantile scores take values 0..q-1") {
    Rng rng(4);
    Eigen::MatrixXd Z(40, 3);
    for (Eigen::Index i = 0; i < Z.size(); ++i) Z(i) = rng.normal();
    const auto Q = quantile_scores(Z, 4);
    CHECK(Q.minCoeff() == 0.0);
    CHECK(Q.maxCoeff() == 3.0);
    for (Eigen::Index j = 0; j < 3; ++j) CHECK(Q.col(j).sum() == doctest::Approx(60.0));
}

TEST_CASE("estimated weights lie on the simplex, per bootstrap and averaged") {
    const auto d = mixture_data(2, 0.6);
    WqsConfig cfg;
    cfg.n_bootstrap = 20;
    Rng rng(9);
    const auto Q = quantile_scores(d.Z, cfg.q);
    const auto est = estimate_weights(Q, d.y, d.X, cfg, rng);
    auto on_simplex = [](const Eigen::VectorXd& w) {
        return std::abs(w.sum() - 1.0) < 1e-10 && w.minCoeff() >= 0.0;
    };
    CHECK(on_simplex(est.weights));
    for (const auto& w : est.bootstrap_weights) CHECK(on_simplex(w));
    CHECK(est.bootstrap_weights.size() + est.n_failed == 20);
    Eigen::Index top;
    est.weights.maxCoeff(&top);
    CHECK(top == 0);
}

TEST_CASE("index regression matches least squares on [index, X]") {
    Rng rng(5);
    const Eigen::Index n = 50;
    Eigen::VectorXd index(n), y(n);
    Eigen::MatrixXd X(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
        index(i) = 3.0 * rng.uniform01();
        X(i, 0) = 1.0;
        X(i, 1) = rng.normal();
        y(i) = 0.5 * index(i) + X(i, 1) + rng.normal();
    }
    const auto fit = fit_index_regression(y, index, X);
    Eigen::MatrixXd D(n, 3);
    D << index, X;
    const Eigen::VectorXd b = testsupport::ols(D, y);
    const double s2 = (y - D * b).squaredNorm() / (n - 3);
    const double se = std::sqrt(s2 * (D.transpose() * D).inverse()(0, 0));
    CHECK(fit.beta == doctest::Approx(b(0)).epsilon(1e-10));
    CHECK(fit.se == doctest::Approx(se).epsilon(1e-10));
    CHECK(fit.residual_df == n - 3);
    CHECK(fit.ci95.first == doctest::Approx(b(0) - 1.96 * se));
}

TEST_CASE("important components exceed tau") {
    Eigen::VectorXd w(4);
    w << 0.5, 0.25, 0.2, 0.05;
    CHECK(important_components(w, 0.25) == std::vector<std::size_t>{0});
    CHECK(important_components(w, 0.1) == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("wqs_run is deterministic for a seed and records the split") {
    const auto d = mixture_data(3, 0.5);
    WqsConfig cfg;
    cfg.n_bootstrap = 15;
    const auto a = wqs_run(d, cfg, 11), b = wqs_run(d, cfg, 11), c = wqs_run(d, cfg, 12);
    CHECK(a.weights == b.weights);
    CHECK(a.index_beta == b.index_beta);
    CHECK(a.train_indices != c.train_indices);
    CHECK(a.train_indices.size() + a.test_indices.size() == d.n());
}

TEST_CASE("negative direction constrains the index coefficient") {
    auto d = mixture_data(4, -0.6);
    WqsConfig cfg;
    cfg.n_bootstrap = 15;
    cfg.direction = Direction::Negative;
    const auto fit = wqs_run(d, cfg, 1);
    CHECK(fit.index_beta < 0.0);
}

TEST_CASE("Rubin pooling: df and interval") {
    const std::vector<double> q{1.0, 1.2, 0.8}, u{0.04, 0.05, 0.06};
    const auto p = rubins_pool(q, u);
    CHECK(p.estimate == doctest::Approx(1.0));
    CHECK(p.within_var == doctest::Approx(0.05));
    CHECK(p.between_var == doctest::Approx(0.04));
    const double t = 0.05 + (4.0 / 3.0) * 0.04;
    CHECK(p.total_var == doctest::Approx(t));
    const double gamma = (4.0 / 3.0) * 0.04 / t;
    CHECK(p.df == doctest::Approx(2.0 / (gamma * gamma)));
    CHECK(p.ci95.second - p.estimate == doctest::Approx(t_quantile_975(p.df) * std::sqrt(t)));

    // identical estimates: no between variance, normal interval
    const std::vector<double> same{2.0, 2.0};
    const auto z = rubins_pool(same, std::vector<double>{1.0, 1.0});
    CHECK(z.between_var == 0.0);
    CHECK(std::isinf(z.df));
    CHECK(z.ci95.second == doctest::Approx(2.0 + 1.959963985));

    // finite complete-data df shrinks the pooled df
    const auto small = rubins_pool(q, u, 10.0);
    CHECK(small.df < p.df);

    CHECK_THROWS_AS(rubins_pool(std::vector<double>{1.0}, std::vector<double>{1.0}), Error);
}

TEST_CASE("t quantiles") {
    CHECK(t_quantile_975(1.0) == doctest::Approx(12.7062047));
    CHECK(t_quantile_975(10.0) == doctest::Approx(2.2281389));
    CHECK(t_quantile_975(std::numeric_limits<double>::infinity()) == doctest::Approx(1.9599640));
}
