#include "seedsweep/io/serialize.hpp"

#include <cmath>

#include <json.hpp>

#include "seedsweep/core/error.hpp"

namespace seedsweep::io {

namespace {

using nlohmann::json;
using namespace seedsweep::sweep;

// ---- scalars and containers ------------------------------------------------

json num(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

double real(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
        if (s == "inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
        throw_data("E_DATA_JSON", "expected a number, found '" + s + "'");
    }
    return j.get<double>();
}

json nums(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(num(x));
    return a;
}

std::vector<double> reals(const json& j) {
    std::vector<double> out;
    for (const auto& e : j) out.push_back(real(e));
    return out;
}

json nums(const Eigen::VectorXd& v) { return nums(std::vector<double>(v.data(), v.data() + v.size())); }

Eigen::VectorXd vec(const json& j) {
    const auto v = reals(j);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

template <class T, class F>
json list(const std::vector<T>& items, F&& enc) {
    json a = json::array();
    for (const auto& x : items) a.push_back(enc(x));
    return a;
}

template <class T, class F>
std::vector<T> unlist(const json& j, F&& dec) {
    std::vector<T> out;
    for (const auto& e : j) out.push_back(dec(e));
    return out;
}

// ---- summary pieces ----------------------------------------------------------

json enc_five(const FiveNumber& f) {
    return {{"min", num(f.min)}, {"iqr_low", num(f.iqr_low)}, {"median", num(f.median)},
            {"iqr_high", num(f.iqr_high)}, {"max", num(f.max)}};
}

FiveNumber dec_five(const json& j) {
    return {real(j.at("min")), real(j.at("iqr_low")), real(j.at("median")), real(j.at("iqr_high")), real(j.at("max"))};
}

json enc_coef(const CoefficientSummary& c) {
    return {{"name", c.name},          {"index", c.index},  {"proportion", num(c.proportion)},
            {"stats", enc_five(c.stats)}, {"values", nums(c.values)}, {"largest_count", c.largest_count}};
}

CoefficientSummary dec_coef(const json& j) {
    CoefficientSummary c;
    c.name = j.at("name").get<std::string>();
    c.index = j.at("index").get<std::size_t>();
    c.proportion = real(j.at("proportion"));
    c.stats = dec_five(j.at("stats"));
    c.values = reals(j.at("values"));
    c.largest_count = j.at("largest_count").get<std::size_t>();
    return c;
}

json enc_pooled(const wqs::PooledEstimate& p) {
    return {{"estimate", num(p.estimate)},   {"within_var", num(p.within_var)}, {"between_var", num(p.between_var)},
            {"total_var", num(p.total_var)}, {"df", num(p.df)},                  {"ci95", {num(p.ci95.first), num(p.ci95.second)}},
            {"m", p.m}};
}

wqs::PooledEstimate dec_pooled(const json& j) {
    wqs::PooledEstimate p;
    p.estimate = real(j.at("estimate"));
    p.within_var = real(j.at("within_var"));
    p.between_var = real(j.at("between_var"));
    p.total_var = real(j.at("total_var"));
    p.df = real(j.at("df"));
    p.ci95 = {real(j.at("ci95").at(0)), real(j.at("ci95").at(1))};
    p.m = j.at("m").get<std::size_t>();
    return p;
}

json enc_pip_row(const PipRow& r) {
    return {{"label", r.label},         {"group", r.group},   {"min", num(r.min)},        {"median", num(r.median)},
            {"max", num(r.max)},         {"values", nums(r.values)}, {"never_active", r.never_active}};
}

PipRow dec_pip_row(const json& j) {
    PipRow r;
    r.label = j.at("label").get<std::string>();
    r.group = j.at("group").get<std::string>();
    r.min = real(j.at("min"));
    r.median = real(j.at("median"));
    r.max = real(j.at("max"));
    r.values = reals(j.at("values"));
    r.never_active = j.at("never_active").get<std::size_t>();
    return r;
}

template <class T, class F>
json opt(const std::optional<T>& v, F&& enc) {
    return v ? enc(*v) : json(nullptr);
}

template <class T, class F>
std::optional<T> unopt(const json& j, const char* key, F&& dec) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return dec(j.at(key));
}

// ---- per-seed pieces ---------------------------------------------------------

json enc_penalized(const PenalizedSeedResult& r) {
    return {{"beta", nums(r.beta)},           {"lambda", num(r.lambda)},       {"lambda_index", r.lambda_index},
            {"retained", r.retained},         {"lambda_grid", nums(r.lambda_grid)}, {"cv_mean", nums(r.cv_mean)},
            {"cv_se", nums(r.cv_se)},         {"group_norms", nums(r.group_norms)}, {"converged", r.converged}};
}

PenalizedSeedResult dec_penalized(const json& j) {
    PenalizedSeedResult r;
    r.beta = vec(j.at("beta"));
    r.lambda = real(j.at("lambda"));
    r.lambda_index = j.at("lambda_index").get<std::size_t>();
    r.retained = j.at("retained").get<std::size_t>();
    r.lambda_grid = reals(j.at("lambda_grid"));
    r.cv_mean = reals(j.at("cv_mean"));
    r.cv_se = reals(j.at("cv_se"));
    r.group_norms = reals(j.at("group_norms"));
    r.converged = j.at("converged").get<bool>();
    return r;
}

json enc_wqs(const wqs::WqsFit& f) {
    return {{"weights", nums(f.weights)},
            {"index_beta", num(f.index_beta)},
            {"index_se", num(f.index_se)},
            {"ci95", {num(f.ci95.first), num(f.ci95.second)}},
            {"residual_df", num(f.residual_df)},
            {"train_indices", f.train_indices},
            {"test_indices", f.test_indices},
            {"seed", f.seed},
            {"flagged", f.flagged},
            {"n_matching", f.n_matching},
            {"n_failed", f.n_failed}};
}

wqs::WqsFit dec_wqs(const json& j) {
    wqs::WqsFit f;
    f.weights = vec(j.at("weights"));
    f.index_beta = real(j.at("index_beta"));
    f.index_se = real(j.at("index_se"));
    f.ci95 = {real(j.at("ci95").at(0)), real(j.at("ci95").at(1))};
    f.residual_df = real(j.at("residual_df"));
    f.train_indices = j.at("train_indices").get<std::vector<std::size_t>>();
    f.test_indices = j.at("test_indices").get<std::vector<std::size_t>>();
    f.seed = j.at("seed").get<std::uint64_t>();
    f.flagged = j.at("flagged").get<bool>();
    f.n_matching = j.at("n_matching").get<std::size_t>();
    f.n_failed = j.at("n_failed").get<std::size_t>();
    return f;
}

json enc_curve(const bkmr::ExposureResponse& c) {
    return {{"exposure", c.exposure}, {"grid", nums(c.grid)},   {"mean", nums(c.mean)},
            {"lower", nums(c.lower)}, {"upper", nums(c.upper)}};
}

bkmr::ExposureResponse dec_curve(const json& j) {
    bkmr::ExposureResponse c;
    c.exposure = j.at("exposure").get<std::size_t>();
    c.grid = reals(j.at("grid"));
    c.mean = reals(j.at("mean"));
    c.lower = reals(j.at("lower"));
    c.upper = reals(j.at("upper"));
    return c;
}

json enc_effect(const bkmr::MixtureEffect& e) {
    return {{"percentile", num(e.percentile)}, {"mean", num(e.mean)}, {"lower", num(e.lower)}, {"upper", num(e.upper)}};
}

bkmr::MixtureEffect dec_effect(const json& j) {
    return {real(j.at("percentile")), real(j.at("mean")), real(j.at("lower")), real(j.at("upper"))};
}

json enc_bkmr(const BkmrSeedResult& b) {
    return {{"pips",
             {{"group_pips", nums(b.pips.group_pips)},
              {"conditional_pips", nums(b.pips.conditional_pips)},
              {"group_never_active", b.pips.group_never_active}}},
            {"curves", list(b.curves, enc_curve)},
            {"mixture", list(b.mixture, enc_effect)},
            {"rhat", num(b.rhat)},
            {"rhat_flag", b.rhat_flag},
            {"lam_acceptance", num(b.lam_acceptance)},
            {"r_acceptance", num(b.r_acceptance)},
            {"toggle_acceptance", num(b.toggle_acceptance)}};
}

BkmrSeedResult dec_bkmr(const json& j) {
    BkmrSeedResult b;
    const auto& p = j.at("pips");
    b.pips.group_pips = reals(p.at("group_pips"));
    b.pips.conditional_pips = reals(p.at("conditional_pips"));
    b.pips.group_never_active = p.at("group_never_active").get<std::vector<bool>>();
    b.curves = unlist<bkmr::ExposureResponse>(j.at("curves"), dec_curve);
    b.mixture = unlist<bkmr::MixtureEffect>(j.at("mixture"), dec_effect);
    b.rhat = real(j.at("rhat"));
    b.rhat_flag = j.at("rhat_flag").get<bool>();
    b.lam_acceptance = real(j.at("lam_acceptance"));
    b.r_acceptance = real(j.at("r_acceptance"));
    b.toggle_acceptance = real(j.at("toggle_acceptance"));
    return b;
}

json parse(std::string_view text, const char* what) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw_data("E_DATA_JSON", std::string("malformed ") + what + ": " + e.what());
    }
}

void check_version(const json& j, const char* what) {
    const int v = j.at("schema_version").get<int>();
    if (v != SweepSummary::kSchemaVersion)
        throw_data("E_DATA_SCHEMA", std::string(what) + " has schema version " + std::to_string(v) + ", expected " +
                                        std::to_string(SweepSummary::kSchemaVersion));
}

template <class F>
auto guarded(const char* what, F&& body) {
    try {
        return body();
    } catch (const json::exception& e) {
        throw_data("E_DATA_JSON", std::string("invalid ") + what + ": " + e.what());
    }
}

}  // namespace

std::string summary_to_json(const SweepSummary& s) {
    json j;
    j["schema_version"] = s.schema_version;
    j["model"] = s.model;
    j["seeds"] = s.seeds;
    j["failures"] = list(s.failures, [](const Failure& f) {
        return json{{"seed", f.seed}, {"code", f.code}, {"message", f.message}};
    });
    j["penalized"] = opt(s.penalized, [](const PenalizedSummary& p) {
        const auto& l = p.lambda;
        json hist = json::array();
        for (const auto& [count, seeds] : l.retained_histogram) hist.push_back({count, seeds});
        return json{{"coefficients", list(p.coefficients, enc_coef)},
                    {"lambda",
                     {{"values", nums(l.values)},
                      {"stats", enc_five(l.stats)},
                      {"distinct", l.distinct},
                      {"retained", l.retained},
                      {"retained_histogram", hist}}}};
    });
    j["cv_curves"] = list(s.cv_curves, [](const CvCurveRecord& c) {
        return json{{"seed", c.seed}, {"lambda", nums(c.lambda)}, {"mean_error", nums(c.mean_error)},
                    {"se_error", nums(c.se_error)}};
    });
    j["weights"] = opt(s.weights, [](const WeightSummary& w) {
        const auto& i = w.index;
        return json{{"tau", num(w.tau)},
                    {"weights", list(w.weights, enc_coef)},
                    {"index",
                     {{"beta", nums(i.beta)},
                      {"se", nums(i.se)},
                      {"lower", nums(i.lower)},
                      {"upper", nums(i.upper)},
                      {"residual_df", nums(i.residual_df)},
                      {"excluding_zero", i.excluding_zero},
                      {"pooled", enc_pooled(i.pooled)}}}};
    });
    j["pips"] = opt(s.pips, [](const PipSummary& p) {
        return json{{"groups", list(p.groups, enc_pip_row)}, {"conditional", list(p.conditional, enc_pip_row)}};
    });
    j["curves"] = list(s.curves, [](const CurveBundle& b) {
        json per_seed = json::array();
        for (const auto& c : b.per_seed) per_seed.push_back(nums(c));
        return json{{"exposure", b.exposure}, {"name", b.name},          {"grid", nums(b.grid)},
                    {"per_seed", per_seed},   {"median", nums(b.median)}};
    });
    j["mixture"] = list(s.mixture, [](const MixtureSummary& m) {
        return json{{"percentile", num(m.percentile)}, {"mean", nums(m.mean)}, {"lower", nums(m.lower)},
                    {"upper", nums(m.upper)},          {"median", num(m.median)}};
    });
    j["diagnostics"] = opt(s.diagnostics, [](const BkmrDiagnostics& d) {
        return json{{"rhat", nums(d.rhat)},
                    {"flagged", d.flagged},
                    {"lam_acceptance", nums(d.lam_acceptance)},
                    {"r_acceptance", nums(d.r_acceptance)},
                    {"toggle_acceptance", nums(d.toggle_acceptance)}};
    });
    return j.dump(2) + "\n";
}

SweepSummary summary_from_json(std::string_view text) {
    const json j = parse(text, "summary JSON");
    return guarded("summary JSON", [&] {
        check_version(j, "summary");
        SweepSummary s;
        s.schema_version = j.at("schema_version").get<int>();
        s.model = j.at("model").get<std::string>();
        s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        s.failures = unlist<Failure>(j.at("failures"), [](const json& f) {
            return Failure{f.at("seed").get<std::uint64_t>(), f.at("code").get<std::string>(),
                           f.at("message").get<std::string>()};
        });
        s.penalized = unopt<PenalizedSummary>(j, "penalized", [](const json& p) {
            PenalizedSummary out;
            out.coefficients = unlist<CoefficientSummary>(p.at("coefficients"), dec_coef);
            const auto& l = p.at("lambda");
            out.lambda.values = reals(l.at("values"));
            out.lambda.stats = dec_five(l.at("stats"));
            out.lambda.distinct = l.at("distinct").get<std::size_t>();
            out.lambda.retained = l.at("retained").get<std::vector<std::size_t>>();
            for (const auto& h : l.at("retained_histogram"))
                out.lambda.retained_histogram.emplace_back(h.at(0).get<std::size_t>(), h.at(1).get<std::size_t>());
            return out;
        });
        s.cv_curves = unlist<CvCurveRecord>(j.at("cv_curves"), [](const json& c) {
            return CvCurveRecord{c.at("seed").get<std::uint64_t>(), reals(c.at("lambda")), reals(c.at("mean_error")),
                                 reals(c.at("se_error"))};
        });
        s.weights = unopt<WeightSummary>(j, "weights", [](const json& w) {
            WeightSummary out;
            out.tau = real(w.at("tau"));
            out.weights = unlist<CoefficientSummary>(w.at("weights"), dec_coef);
            const auto& i = w.at("index");
            out.index.beta = reals(i.at("beta"));
            out.index.se = reals(i.at("se"));
            out.index.lower = reals(i.at("lower"));
            out.index.upper = reals(i.at("upper"));
            out.index.residual_df = reals(i.at("residual_df"));
            out.index.excluding_zero = i.at("excluding_zero").get<std::size_t>();
            out.index.pooled = dec_pooled(i.at("pooled"));
            return out;
        });
        s.pips = unopt<PipSummary>(j, "pips", [](const json& p) {
            return PipSummary{unlist<PipRow>(p.at("groups"), dec_pip_row), unlist<PipRow>(p.at("conditional"), dec_pip_row)};
        });
        s.curves = unlist<CurveBundle>(j.at("curves"), [](const json& b) {
            CurveBundle out;
            out.exposure = b.at("exposure").get<std::size_t>();
            out.name = b.at("name").get<std::string>();
            out.grid = reals(b.at("grid"));
            for (const auto& c : b.at("per_seed")) out.per_seed.push_back(reals(c));
            out.median = reals(b.at("median"));
            return out;
        });
        s.mixture = unlist<MixtureSummary>(j.at("mixture"), [](const json& m) {
            return MixtureSummary{real(m.at("percentile")), reals(m.at("mean")), reals(m.at("lower")),
                                  reals(m.at("upper")), real(m.at("median"))};
        });
        s.diagnostics = unopt<BkmrDiagnostics>(j, "diagnostics", [](const json& d) {
            return BkmrDiagnostics{reals(d.at("rhat")), d.at("flagged").get<std::size_t>(), reals(d.at("lam_acceptance")),
                                   reals(d.at("r_acceptance")), reals(d.at("toggle_acceptance"))};
        });
        return s;
    });
}

std::string results_to_json(const SweepResult& r) {
    json j;
    j["schema_version"] = SweepSummary::kSchemaVersion;
    j["model"] = model_name(r.model);
    j["tau"] = num(r.tau);
    j["labels"] = {{"exposure_names", r.labels.exposure_names},
                   {"covariate_names", r.labels.covariate_names},
                   {"group_names", r.labels.group_names},
                   {"group_assignments", r.labels.group_assignments},
                   {"penalty_mask", r.labels.penalty_mask}};
    j["results"] = list(r.results, [](const SeedResult& s) {
        return json{{"seed", s.seed},
                    {"ok", s.ok},
                    {"error_code", s.error_code},
                    {"error_message", s.error_message},
                    {"penalized", opt(s.penalized, enc_penalized)},
                    {"wqs", opt(s.wqs, enc_wqs)},
                    {"bkmr", opt(s.bkmr, enc_bkmr)}};
    });
    return j.dump(2) + "\n";
}

SweepResult results_from_json(std::string_view text) {
    const json j = parse(text, "per-seed JSON");
    return guarded("per-seed JSON", [&] {
        check_version(j, "per-seed results");
        SweepResult r;
        r.model = parse_model(j.at("model").get<std::string>());
        r.tau = real(j.at("tau"));
        const auto& l = j.at("labels");
        r.labels.exposure_names = l.at("exposure_names").get<std::vector<std::string>>();
        r.labels.covariate_names = l.at("covariate_names").get<std::vector<std::string>>();
        r.labels.group_names = l.at("group_names").get<std::vector<std::string>>();
        r.labels.group_assignments = l.at("group_assignments").get<std::vector<int>>();
        r.labels.penalty_mask = l.at("penalty_mask").get<std::vector<bool>>();
        r.results = unlist<SeedResult>(j.at("results"), [](const json& s) {
            SeedResult out;
            out.seed = s.at("seed").get<std::uint64_t>();
            out.ok = s.at("ok").get<bool>();
            out.error_code = s.at("error_code").get<std::string>();
            out.error_message = s.at("error_message").get<std::string>();
            out.penalized = unopt<PenalizedSeedResult>(s, "penalized", dec_penalized);
            out.wqs = unopt<wqs::WqsFit>(s, "wqs", dec_wqs);
            out.bkmr = unopt<BkmrSeedResult>(s, "bkmr", dec_bkmr);
            return out;
        });
        return r;
    });
}

}  // namespace seedsweep::io
