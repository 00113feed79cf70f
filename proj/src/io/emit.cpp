#include "seedsweep/io/emit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "seedsweep/core/error.hpp"
#include "seedsweep/io/csv.hpp"
#include "seedsweep/io/serialize.hpp"

namespace seedsweep::io {

using namespace seedsweep::sweep;

void write_text(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw_data("E_DATA_WRITE", "cannot write '" + path.string() + "'");
    out << content;
    out.close();
    if (!out) throw_data("E_DATA_WRITE", "failed writing '" + path.string() + "'");
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_data("E_DATA_FILE_NOT_FOUND", "cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace {

// One CSV document built row by row.
class Table {
public:
    explicit Table(std::initializer_list<std::string> header) { row(std::vector<std::string>(header)); }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << csv_field(cells[i]);
        }
        out_ << '\n';
    }

    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

std::string f(double v) { return format_double(v); }
std::string u(std::uint64_t v) { return std::to_string(v); }

std::vector<std::string> five(const FiveNumber& s) {
    return {f(s.median), f(s.iqr_low), f(s.iqr_high), f(s.min), f(s.max)};
}

std::string coefficients_csv(const SweepSummary& s) {
    Table t({"row_type", "name", "seed", "value", "proportion_nonzero", "median", "iqr_low", "iqr_high", "min", "max"});
    for (const auto& c : s.penalized->coefficients) {
        for (std::size_t k = 0; k < c.values.size(); ++k) t.row({"seed", c.name, u(s.seeds[k]), f(c.values[k]), "", "", "", "", "", ""});
    }
    for (const auto& c : s.penalized->coefficients) {
        std::vector<std::string> cells{"aggregate", c.name, "", "", f(c.proportion)};
        const auto st = five(c.stats);
        cells.insert(cells.end(), st.begin(), st.end());
        t.row(cells);
    }
    return t.str();
}

std::string lambda_csv(const SweepSummary& s) {
    Table t({"seed", "lambda", "retained"});
    const auto& l = s.penalized->lambda;
    for (std::size_t k = 0; k < l.values.size(); ++k) t.row({u(s.seeds[k]), f(l.values[k]), std::to_string(l.retained[k])});
    return t.str();
}

std::string cv_curves_csv(const SweepSummary& s) {
    Table t({"seed", "lambda_index", "lambda", "mean_error", "se_error"});
    for (const auto& c : s.cv_curves) {
        for (std::size_t i = 0; i < c.lambda.size(); ++i)
            t.row({u(c.seed), std::to_string(i), f(c.lambda[i]), f(c.mean_error[i]), f(c.se_error[i])});
    }
    return t.str();
}

std::string weights_csv(const SweepSummary& s) {
    Table t({"row_type", "name", "seed", "value", "proportion_above_tau", "largest_count", "median", "iqr_low",
             "iqr_high", "min", "max"});
    for (const auto& w : s.weights->weights) {
        for (std::size_t k = 0; k < w.values.size(); ++k)
            t.row({"seed", w.name, u(s.seeds[k]), f(w.values[k]), "", "", "", "", "", "", ""});
    }
    for (const auto& w : s.weights->weights) {
        std::vector<std::string> cells{"aggregate", w.name, "", "", f(w.proportion), std::to_string(w.largest_count)};
        const auto st = five(w.stats);
        cells.insert(cells.end(), st.begin(), st.end());
        t.row(cells);
    }
    return t.str();
}

std::string index_csv(const SweepSummary& s) {
    Table t({"row_type", "seed", "estimate", "se", "ci_low", "ci_high", "df"});
    const auto& i = s.weights->index;
    for (std::size_t k = 0; k < i.beta.size(); ++k)
        t.row({"seed", u(s.seeds[k]), f(i.beta[k]), f(i.se[k]), f(i.lower[k]), f(i.upper[k]), f(i.residual_df[k])});
    const auto& p = i.pooled;
    t.row({"pooled", "", f(p.estimate), f(std::sqrt(p.total_var)), f(p.ci95.first), f(p.ci95.second), f(p.df)});
    return t.str();
}

std::string pips_csv(const SweepSummary& s) {
    Table t({"row_type", "level", "group", "name", "seed", "value", "min", "median", "max", "min_display",
             "median_display", "max_display"});
    auto rows = [&](const std::vector<PipRow>& list, const char* level) {
        for (const auto& r : list) {
            for (std::size_t k = 0; k < r.values.size(); ++k)
                t.row({"seed", level, r.group, r.label, u(s.seeds[k]), f(r.values[k]), "", "", "", "", "", ""});
        }
        for (const auto& r : list)
            t.row({"aggregate", level, r.group, r.label, "", "", f(r.min), f(r.median), f(r.max), format_pip(r.min),
                   format_pip(r.median), format_pip(r.max)});
    };
    rows(s.pips->groups, "group");
    rows(s.pips->conditional, "conditional");
    return t.str();
}

std::string exposure_response_csv(const SweepSummary& s) {
    Table t({"row_type", "exposure", "seed", "grid_index", "grid_value", "value"});
    for (const auto& b : s.curves) {
        for (std::size_t k = 0; k < b.per_seed.size(); ++k) {
            for (std::size_t i = 0; i < b.grid.size(); ++i)
                t.row({"seed", b.name, u(s.seeds[k]), std::to_string(i), f(b.grid[i]), f(b.per_seed[k][i])});
        }
        for (std::size_t i = 0; i < b.grid.size(); ++i)
            t.row({"median", b.name, "", std::to_string(i), f(b.grid[i]), f(b.median[i])});
    }
    return t.str();
}

std::string mixture_csv(const SweepSummary& s) {
    Table t({"row_type", "percentile", "seed", "mean", "lower", "upper"});
    for (const auto& m : s.mixture) {
        for (std::size_t k = 0; k < m.mean.size(); ++k)
            t.row({"seed", f(m.percentile), u(s.seeds[k]), f(m.mean[k]), f(m.lower[k]), f(m.upper[k])});
        t.row({"median", f(m.percentile), "", f(m.median), "", ""});
    }
    return t.str();
}

std::string diagnostics_csv(const SweepSummary& s) {
    Table t({"seed", "rhat", "lam_acceptance", "r_acceptance", "toggle_acceptance"});
    const auto& d = *s.diagnostics;
    for (std::size_t k = 0; k < d.rhat.size(); ++k)
        t.row({u(s.seeds[k]), f(d.rhat[k]), f(d.lam_acceptance[k]), f(d.r_acceptance[k]), f(d.toggle_acceptance[k])});
    return t.str();
}

std::string failures_csv(const SweepSummary& s) {
    Table t({"seed", "code", "message"});
    for (const auto& x : s.failures) t.row({u(x.seed), x.code, x.message});
    return t.str();
}

}  // namespace

std::string pip_table_text(const PipSummary& pips) {
    std::size_t w1 = 5, w2 = 8;
    for (const auto& r : pips.groups) w1 = std::max(w1, r.label.size());
    for (const auto& r : pips.conditional) {
        w1 = std::max(w1, r.group.size());
        w2 = std::max(w2, r.label.size());
    }
    auto pad = [](const std::string& s, std::size_t w) { return s + std::string(w > s.size() ? w - s.size() : 0, ' '); };
    auto nums = [&](const PipRow& r) {
        return pad(format_pip(r.min), 9) + pad(format_pip(r.median), 9) + format_pip(r.max);
    };
    std::ostringstream out;
    out << "Posterior inclusion probabilities\n";
    out << pad("Group", w1 + 2) << pad("", w2 + 2) << pad("Minimum", 9) << pad("Median", 9) << "Maximum\n";
    for (const auto& r : pips.groups) out << pad(r.label, w1 + 2) << pad("", w2 + 2) << nums(r) << '\n';
    out << "\nConditional posterior inclusion probabilities\n";
    out << pad("Group", w1 + 2) << pad("Exposure", w2 + 2) << pad("Minimum", 9) << pad("Median", 9) << "Maximum\n";
    std::string last;
    for (const auto& r : pips.conditional) {
        out << pad(r.group == last ? "" : r.group, w1 + 2) << pad(r.label, w2 + 2) << nums(r) << '\n';
        last = r.group;
    }
    return out.str();
}

std::vector<std::filesystem::path> emit_outputs(const SweepSummary& summary, const SweepResult* result,
                                                const std::filesystem::path& dir, OutputFormat format) {
    if (dir.empty()) throw_usage("E_USAGE_OUTPUT", "output directory path is empty");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw_data("E_DATA_WRITE", "cannot create output directory '" + dir.string() + "': " + ec.message());

    std::vector<std::filesystem::path> written;
    auto put = [&](const char* name, const std::string& content) {
        const auto path = dir / name;
        write_text(path, content);
        written.push_back(path);
    };
    put("summary.json", summary_to_json(summary));
    if (result) put("per_seed.json", results_to_json(*result));
    if (format == OutputFormat::Json) return written;

    if (summary.penalized) {
        put("coefficients.csv", coefficients_csv(summary));
        put("lambda.csv", lambda_csv(summary));
        put("cv_curves.csv", cv_curves_csv(summary));
    }
    if (summary.weights) {
        put("weights.csv", weights_csv(summary));
        put("index_estimates.csv", index_csv(summary));
    }
    if (summary.pips) {
        put("pips.csv", pips_csv(summary));
        put("pip_table.txt", pip_table_text(*summary.pips));
        if (!summary.curves.empty()) put("exposure_response.csv", exposure_response_csv(summary));
        if (!summary.mixture.empty()) put("mixture_effect.csv", mixture_csv(summary));
    }
    if (summary.diagnostics) put("diagnostics.csv", diagnostics_csv(summary));
    put("failures.csv", failures_csv(summary));
    return written;
}

}  // namespace seedsweep::io
