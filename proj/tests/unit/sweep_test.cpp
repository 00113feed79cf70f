#include <doctest.h>

#include "seedsweep/core/error.hpp"
#include "seedsweep/io/synthetic.hpp"
#include "seedsweep/sweep/summary.hpp"
#include "seedsweep/sweep/sweep.hpp"

using namespace seedsweep;
using namespace seedsweep::sweep;

namespace {

Dataset data(std::size_t n = 150) {
    io::SyntheticSpec spec;
    spec.n = n;
    spec.p = 6;
    spec.groups = 3;
    spec.beta = {0.4, 0.2, 0.0, 0.0, 0.1, 0.0};
    spec.seed = 2;
    return io::generate_synthetic(spec);
}

}  // namespace

TEST_CASE("model names round-trip") {
    for (auto m : {Model::Lasso, Model::GroupLasso, Model::Wqs, Model::Bkmr}) CHECK(parse_model(model_name(m)) == m);
    CHECK_THROWS_AS(parse_model("ridge"), Error);
}

TEST_CASE("sweep results do not depend on the job count") {
    const auto d = data();
    for (auto model : {Model::Lasso, Model::GroupLasso, Model::Wqs}) {
        SweepConfig cfg;
        cfg.model = model;
        cfg.seeds = {5, 1, 3, 2, 4};
        cfg.wqs.n_bootstrap = 10;
        const auto a = run_sweep(d, cfg);
        cfg.jobs = 4;
        const auto b = run_sweep(d, cfg);
        REQUIRE(a.results.size() == 5);
        for (std::size_t k = 0; k < 5; ++k) {
            CHECK(a.results[k].seed == k + 1);
            CHECK(b.results[k].seed == k + 1);
        }
        CHECK(summarize(a) == summarize(b));
    }
}

TEST_CASE("each seed result equals a standalone run") {
    const auto d = data();
    SweepConfig cfg;
    cfg.seeds = {7, 8};
    const auto sweep = run_sweep(d, cfg);
    const auto solo = run_seed(d, cfg, 8);
    CHECK(sweep.results[1].penalized->beta == solo.penalized->beta);
    CHECK(sweep.results[1].penalized->lambda == solo.penalized->lambda);
}

TEST_CASE("a sweep in which every seed fails raises") {
    const auto d = data(150);
    SweepConfig cfg;
    cfg.model = Model::Wqs;
    cfg.seeds = {1, 2};
    cfg.wqs.n_bootstrap = 5;
    cfg.wqs.q = 200;  // more bins than rows
    try {
        run_sweep(d, cfg);
        FAIL("expected an exception");
    } catch (const Error& e) {
        CHECK(e.code() == "E_MODEL_ALL_SEEDS_FAILED");
    }
}

TEST_CASE("sweep configuration validation") {
    const auto d = data();
    SweepConfig cfg;
    cfg.seeds = {};
    CHECK_THROWS_AS(cfg.validate(d), Error);
    cfg.seeds = {1, 1};
    CHECK_THROWS_AS(cfg.validate(d), Error);
    cfg.seeds = {1};
    cfg.jobs = 0;
    CHECK_THROWS_AS(cfg.validate(d), Error);
    cfg.jobs = 1;
    cfg.model = Model::Bkmr;
    cfg.bkmr.mcmc.max_n = 10;
    CHECK_THROWS_AS(cfg.validate(d), Error);
    CHECK(SweepConfig::default_seeds().size() == 100);
}

TEST_CASE("PIP display rule") {
    CHECK(format_pip(0.0) == "0.00");
    CHECK(format_pip(1.0) == "1.00");
    CHECK(format_pip(0.456) == "0.46");
    CHECK(format_pip(0.004) == "0.004");
    CHECK(format_pip(0.00042) == "0.0004");
    CHECK(format_pip(0.005) == "0.01");
}

TEST_CASE("summaries skip failed seeds and list them") {
    const auto d = data();
    SweepConfig cfg;
    cfg.seeds = {1, 2, 3};
    auto result = run_sweep(d, cfg);
    result.results[1].ok = false;
    result.results[1].error_code = "E_MODEL_TEST";
    result.results[1].error_message = "synthetic failure";
    const auto s = summarize(result);
    CHECK(s.seeds == std::vector<std::uint64_t>{1, 3});
    REQUIRE(s.failures.size() == 1);
    CHECK(s.failures[0].seed == 2);
    CHECK(s.penalized->coefficients[0].values.size() == 2);
    CHECK(s.cv_curves.size() == 2);
}

TEST_CASE("curves with different grids are rejected") {
    SweepLabels labels;
    labels.exposure_names = {"a"};
    bkmr::ExposureResponse r1{0, {0.0, 1.0}, {1, 2}, {0, 1}, {2, 3}};
    bkmr::ExposureResponse r2{0, {0.0, 1.5}, {1, 2}, {0, 1}, {2, 3}};
    const std::vector<std::vector<bkmr::ExposureResponse>> curves{{r1}, {r2}};
    CHECK_THROWS_AS(summarize_curves(curves, labels), Error);
    const std::vector<std::vector<bkmr::ExposureResponse>> same{{r1}, {r1}};
    const auto b = summarize_curves(same, labels);
    CHECK(b[0].median == std::vector<double>{1, 2});
}
