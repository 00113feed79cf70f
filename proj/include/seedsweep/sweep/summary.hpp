#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seedsweep/bkmr/posterior.hpp"
#include "seedsweep/core/stats.hpp"
#include "seedsweep/sweep/sweep.hpp"
#include "seedsweep/wqs/rubin.hpp"

namespace seedsweep::sweep {

/// Across-seed record for one coefficient or weight.
struct CoefficientSummary {
    std::string name;
    std::size_t index = 0;    // design column (penalized models) or exposure (WQS)
    double proportion = 0.0;  // nonzero share, or share above tau for WQS
    FiveNumber stats;
    std::vector<double> values;     // one per successful seed, ascending seed
    std::size_t largest_count = 0;  // WQS: seeds where this weight is the largest (ties all credited)

    bool operator==(const CoefficientSummary&) const = default;
};

struct LambdaSummary {
    std::vector<double> values;  // chosen lambda per seed
    FiveNumber stats;
    std::size_t distinct = 0;
    std::vector<std::size_t> retained;  // nonzero penalized coefficients per seed
    std::vector<std::pair<std::size_t, std::size_t>> retained_histogram;  // (count, seeds), ascending count

    bool operator==(const LambdaSummary&) const = default;
};

struct PenalizedSummary {
    std::vector<CoefficientSummary> coefficients;  // penalized design columns only
    LambdaSummary lambda;

    bool operator==(const PenalizedSummary&) const = default;
};

struct IndexEstimates {
    std::vector<double> beta;
    std::vector<double> se;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> residual_df;
    std::size_t excluding_zero = 0;  // per-seed CIs that exclude 0
    wqs::PooledEstimate pooled;

    bool operator==(const IndexEstimates&) const = default;
};

struct WeightSummary {
    double tau = 0.0;
    std::vector<CoefficientSummary> weights;
    IndexEstimates index;

    bool operator==(const WeightSummary&) const = default;
};

struct PipRow {
    std::string label;  // group or exposure name
    std::string group;
    double min = 0.0;
    double median = 0.0;
    double max = 0.0;
    std::vector<double> values;
    std::size_t never_active = 0;  // seeds in which the group was never included

    bool operator==(const PipRow&) const = default;
};

struct PipSummary {
    std::vector<PipRow> groups;       // dataset group order
    std::vector<PipRow> conditional;  // grouped by group, then dataset exposure order

    bool operator==(const PipSummary&) const = default;
};

struct CurveBundle {
    std::size_t exposure = 0;
    std::string name;
    std::vector<double> grid;
    std::vector<std::vector<double>> per_seed;  // [seed][grid point] posterior means
    std::vector<double> median;

    bool operator==(const CurveBundle&) const = default;
};

struct MixtureSummary {
    double percentile = 0.0;
    std::vector<double> mean;  // per seed
    std::vector<double> lower;
    std::vector<double> upper;
    double median = 0.0;  // across seeds, of the per-seed means

    bool operator==(const MixtureSummary&) const = default;
};

struct CvCurveRecord {
    std::uint64_t seed = 0;
    std::vector<double> lambda;
    std::vector<double> mean_error;
    std::vector<double> se_error;

    bool operator==(const CvCurveRecord&) const = default;
};

struct Failure {
    std::uint64_t seed = 0;
    std::string code;
    std::string message;

    bool operator==(const Failure&) const = default;
};

struct BkmrDiagnostics {
    std::vector<double> rhat;  // per seed
    std::size_t flagged = 0;
    std::vector<double> lam_acceptance;
    std::vector<double> r_acceptance;
    std::vector<double> toggle_acceptance;

    bool operator==(const BkmrDiagnostics&) const = default;
};

struct SweepSummary {
    static constexpr int kSchemaVersion = 1;
    int schema_version = kSchemaVersion;
    std::string model;
    std::vector<std::uint64_t> seeds;  // successful, ascending
    std::vector<Failure> failures;
    std::optional<PenalizedSummary> penalized;
    std::vector<CvCurveRecord> cv_curves;
    std::optional<WeightSummary> weights;
    std::optional<PipSummary> pips;
    std::vector<CurveBundle> curves;
    std::vector<MixtureSummary> mixture;
    std::optional<BkmrDiagnostics> diagnostics;

    bool operator==(const SweepSummary&) const = default;
};

/// Penalized-model coefficients; failed seeds are skipped.
PenalizedSummary summarize_coefficients(std::span<const SeedResult> results, const SweepLabels& labels);

/// WQS weights plus pooling of the index coefficient across seeds.
WeightSummary summarize_weights(std::span<const SeedResult> results, const SweepLabels& labels, double tau);

/// Min / median / max PIPs across seeds.
PipSummary summarize_pips(std::span<const bkmr::PipTable> tables, const SweepLabels& labels);

/// Per-seed curves and their pointwise median. All seeds must share one grid.
std::vector<CurveBundle> summarize_curves(std::span<const std::vector<bkmr::ExposureResponse>> curves,
                                          const SweepLabels& labels);

/// Everything relevant to the sweep's model.
SweepSummary summarize(const SweepResult& result);

/// Two decimals; a nonzero value that would print as 0.00 keeps one
/// significant digit instead (0.004).
std::string format_pip(double value);

}  // namespace seedsweep::sweep
