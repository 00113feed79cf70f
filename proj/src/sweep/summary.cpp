#include "seedsweep/sweep/summary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <set>

#include "seedsweep/core/error.hpp"

namespace seedsweep::sweep {

namespace {

std::vector<const SeedResult*> successes(std::span<const SeedResult> results) {
    std::vector<const SeedResult*> ok;
    for (const auto& r : results) {
        if (r.ok) ok.push_back(&r);
    }
    if (ok.empty()) throw_model("E_MODEL_NO_RESULTS", "no successful seeds to summarize");
    return ok;
}

std::string design_name(const SweepLabels& labels, std::size_t j) {
    const std::size_t p = labels.exposure_names.size();
    return j < p ? labels.exposure_names[j] : labels.covariate_names[j - p];
}

PipRow pip_row(std::string label, std::string group, std::vector<double> values) {
    PipRow row;
    row.label = std::move(label);
    row.group = std::move(group);
    row.min = *std::min_element(values.begin(), values.end());
    row.max = *std::max_element(values.begin(), values.end());
    row.median = median(values);
    row.values = std::move(values);
    return row;
}

}  // namespace

PenalizedSummary summarize_coefficients(std::span<const SeedResult> results, const SweepLabels& labels) {
    const auto ok = successes(results);
    PenalizedSummary out;
    const std::size_t cols = labels.penalty_mask.size();
    for (const auto* r : ok) {
        if (!r->penalized || static_cast<std::size_t>(r->penalized->beta.size()) != cols)
            throw_usage("E_USAGE_RESULTS", "result set does not hold penalized fits for this design");
    }
    for (std::size_t j = 0; j < cols; ++j) {
        if (!labels.penalty_mask[j]) continue;
        CoefficientSummary c;
        c.name = design_name(labels, j);
        c.index = j;
        std::size_t nonzero = 0;
        for (const auto* r : ok) {
            const double b = r->penalized->beta(static_cast<Eigen::Index>(j));
            c.values.push_back(b);
            if (b != 0.0) ++nonzero;
        }
        c.proportion = static_cast<double>(nonzero) / static_cast<double>(ok.size());
        c.stats = five_number(c.values);
        out.coefficients.push_back(std::move(c));
    }

    std::map<std::size_t, std::size_t> histogram;
    for (const auto* r : ok) {
        out.lambda.values.push_back(r->penalized->lambda);
        out.lambda.retained.push_back(r->penalized->retained);
        ++histogram[r->penalized->retained];
    }
    out.lambda.stats = five_number(out.lambda.values);
    out.lambda.distinct = std::set<double>(out.lambda.values.begin(), out.lambda.values.end()).size();
    out.lambda.retained_histogram.assign(histogram.begin(), histogram.end());
    return out;
}

WeightSummary summarize_weights(std::span<const SeedResult> results, const SweepLabels& labels, double tau) {
    const auto ok = successes(results);
    const std::size_t p = labels.exposure_names.size();
    for (const auto* r : ok) {
        if (!r->wqs || static_cast<std::size_t>(r->wqs->weights.size()) != p)
            throw_usage("E_USAGE_RESULTS", "result set does not hold WQS fits for these exposures");
    }
    WeightSummary out;
    out.tau = tau;
    std::vector<std::size_t> largest(p, 0);
    for (const auto* r : ok) {
        const double top = r->wqs->weights.maxCoeff();
        for (std::size_t j = 0; j < p; ++j) {
            if (r->wqs->weights(static_cast<Eigen::Index>(j)) == top) ++largest[j];
        }
    }
    for (std::size_t j = 0; j < p; ++j) {
        CoefficientSummary c;
        c.name = labels.exposure_names[j];
        c.index = j;
        std::size_t above = 0;
        for (const auto* r : ok) {
            const double w = r->wqs->weights(static_cast<Eigen::Index>(j));
            c.values.push_back(w);
            if (w > tau) ++above;
        }
        c.proportion = static_cast<double>(above) / static_cast<double>(ok.size());
        c.stats = five_number(c.values);
        c.largest_count = largest[j];
        out.weights.push_back(std::move(c));
    }

    auto& idx = out.index;
    std::vector<double> variances;
    double complete_df = std::numeric_limits<double>::infinity();
    for (const auto* r : ok) {
        const auto& f = *r->wqs;
        idx.beta.push_back(f.index_beta);
        idx.se.push_back(f.index_se);
        idx.lower.push_back(f.ci95.first);
        idx.upper.push_back(f.ci95.second);
        idx.residual_df.push_back(f.residual_df);
        if (f.ci95.first > 0.0 || f.ci95.second < 0.0) ++idx.excluding_zero;
        variances.push_back(f.index_se * f.index_se);
        complete_df = std::min(complete_df, f.residual_df);
    }
    idx.pooled = wqs::rubins_pool(idx.beta, variances, complete_df);
    return out;
}

PipSummary summarize_pips(std::span<const bkmr::PipTable> tables, const SweepLabels& labels) {
    if (tables.empty()) throw_model("E_MODEL_NO_RESULTS", "no PIP tables to summarize");
    const std::size_t groups = labels.group_names.size();
    const std::size_t p = labels.exposure_names.size();
    for (const auto& t : tables) {
        if (t.group_pips.size() != groups || t.conditional_pips.size() != p)
            throw_usage("E_USAGE_RESULTS", "PIP table does not match the group specification");
    }
    PipSummary out;
    for (std::size_t g = 0; g < groups; ++g) {
        std::vector<double> values;
        std::size_t never = 0;
        for (const auto& t : tables) {
            values.push_back(t.group_pips[g]);
            if (!t.group_never_active.empty() && t.group_never_active[g]) ++never;
        }
        PipRow row = pip_row(labels.group_names[g], labels.group_names[g], std::move(values));
        row.never_active = never;
        out.groups.push_back(std::move(row));
    }
    for (std::size_t g = 0; g < groups; ++g) {
        for (std::size_t m = 0; m < p; ++m) {
            if (static_cast<std::size_t>(labels.group_assignments[m]) != g) continue;
            std::vector<double> values;
            for (const auto& t : tables) values.push_back(t.conditional_pips[m]);
            PipRow row = pip_row(labels.exposure_names[m], labels.group_names[g], std::move(values));
            row.never_active = out.groups[g].never_active;
            out.conditional.push_back(std::move(row));
        }
    }
    return out;
}

std::vector<CurveBundle> summarize_curves(std::span<const std::vector<bkmr::ExposureResponse>> curves,
                                          const SweepLabels& labels) {
    if (curves.empty()) throw_model("E_MODEL_NO_RESULTS", "no curves to summarize");
    const auto& first = curves.front();
    std::vector<CurveBundle> out;
    for (std::size_t k = 0; k < first.size(); ++k) {
        CurveBundle b;
        b.exposure = first[k].exposure;
        b.name = labels.exposure_names.at(b.exposure);
        b.grid = first[k].grid;
        for (const auto& seed_curves : curves) {
            if (seed_curves.size() != first.size() || seed_curves[k].exposure != b.exposure ||
                seed_curves[k].grid != b.grid)
                throw_usage("E_USAGE_GRID_MISMATCH", "exposure-response grids differ across seeds");
            b.per_seed.push_back(seed_curves[k].mean);
        }
        for (std::size_t i = 0; i < b.grid.size(); ++i) {
            std::vector<double> column;
            for (const auto& c : b.per_seed) column.push_back(c[i]);
            b.median.push_back(median(column));
        }
        out.push_back(std::move(b));
    }
    return out;
}

SweepSummary summarize(const SweepResult& result) {
    SweepSummary s;
    s.model = model_name(result.model);
    for (const auto& r : result.results) {
        if (r.ok)
            s.seeds.push_back(r.seed);
        else
            s.failures.push_back({r.seed, r.error_code, r.error_message});
    }
    const auto ok = successes(result.results);
    switch (result.model) {
        case Model::Lasso:
        case Model::GroupLasso:
            s.penalized = summarize_coefficients(result.results, result.labels);
            for (const auto* r : ok)
                s.cv_curves.push_back({r->seed, r->penalized->lambda_grid, r->penalized->cv_mean, r->penalized->cv_se});
            break;
        case Model::Wqs: s.weights = summarize_weights(result.results, result.labels, result.tau); break;
        case Model::Bkmr: {
            std::vector<bkmr::PipTable> tables;
            std::vector<std::vector<bkmr::ExposureResponse>> curves;
            BkmrDiagnostics diag;
            for (const auto* r : ok) {
                const auto& b = *r->bkmr;
                tables.push_back(b.pips);
                if (!b.curves.empty()) curves.push_back(b.curves);
                diag.rhat.push_back(b.rhat);
                if (b.rhat_flag) ++diag.flagged;
                diag.lam_acceptance.push_back(b.lam_acceptance);
                diag.r_acceptance.push_back(b.r_acceptance);
                diag.toggle_acceptance.push_back(b.toggle_acceptance);
            }
            s.pips = summarize_pips(tables, result.labels);
            s.diagnostics = std::move(diag);
            if (!curves.empty()) {
                if (curves.size() != ok.size())
                    throw_usage("E_USAGE_RESULTS", "exposure-response curves are missing for some seeds");
                s.curves = summarize_curves(curves, result.labels);
                const auto& first = ok.front()->bkmr->mixture;
                for (std::size_t k = 0; k < first.size(); ++k) {
                    MixtureSummary m;
                    m.percentile = first[k].percentile;
                    for (const auto* r : ok) {
                        const auto& e = r->bkmr->mixture.at(k);
                        m.mean.push_back(e.mean);
                        m.lower.push_back(e.lower);
                        m.upper.push_back(e.upper);
                    }
                    m.median = median(m.mean);
                    s.mixture.push_back(std::move(m));
                }
            }
            break;
        }
    }
    return s;
}

std::string format_pip(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", value);
    if (value <= 0.0 || std::strtod(buf, nullptr) != 0.0) return buf;
    for (int decimals = 3; decimals <= 17; ++decimals) {
        std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
        if (std::strtod(buf, nullptr) != 0.0) break;
    }
    return buf;
}

}  // namespace seedsweep::sweep
