#include "seedsweep/io/config.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <tomlplusplus/toml.hpp>

#include "seedsweep/core/error.hpp"

namespace seedsweep::io {

OutputFormat parse_format(const std::string& name) {
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    throw_usage("E_USAGE_FORMAT", "unknown output format '" + name + "' (expected csv or json)");
}

std::string format_name(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    auto number = [&](std::string_view s) {
        while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
        while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
        std::uint64_t v = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
            throw_usage("E_USAGE_SEEDS", "invalid seed '" + std::string(s) + "' in '" + text + "'");
        return v;
    };
    std::vector<std::uint64_t> seeds;
    const auto dots = text.find("..");
    if (dots != std::string::npos) {
        const std::uint64_t a = number(std::string_view(text).substr(0, dots));
        const std::uint64_t b = number(std::string_view(text).substr(dots + 2));
        if (a > b) throw_usage("E_USAGE_SEEDS", "empty seed range '" + text + "'");
        if (b - a >= 1'000'000) throw_usage("E_USAGE_SEEDS", "seed range '" + text + "' is too long");
        for (std::uint64_t s = a;; ++s) {
            seeds.push_back(s);
            if (s == b) break;
        }
        return seeds;
    }
    std::string_view rest(text);
    while (true) {
        const auto comma = rest.find(',');
        seeds.push_back(number(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
    }
    return seeds;
}

namespace {

// Typed access to one TOML table that remembers which keys were read, so
// leftovers can be reported as unknown.
class Section {
public:
    Section(const toml::table* table, std::string path) : table_(table), path_(std::move(path)) {}

    bool present() const { return table_ != nullptr; }

    const toml::node* node(const std::string& key) {
        used_.insert(key);
        return table_ ? table_->get(key) : nullptr;
    }

    std::optional<double> real(const std::string& key) {
        const auto* n = node(key);
        if (!n) return std::nullopt;
        if (auto v = n->value_exact<double>()) return *v;
        if (auto v = n->value_exact<std::int64_t>()) return static_cast<double>(*v);
        type_error(key, "a number");
    }

    std::optional<std::int64_t> integer(const std::string& key) {
        const auto* n = node(key);
        if (!n) return std::nullopt;
        if (auto v = n->value_exact<std::int64_t>()) return *v;
        type_error(key, "an integer");
    }

    std::optional<bool> boolean(const std::string& key) {
        const auto* n = node(key);
        if (!n) return std::nullopt;
        if (auto v = n->value_exact<bool>()) return *v;
        type_error(key, "true or false");
    }

    std::optional<std::string> string(const std::string& key) {
        const auto* n = node(key);
        if (!n) return std::nullopt;
        if (auto v = n->value_exact<std::string>()) return *v;
        type_error(key, "a string");
    }

    std::optional<std::vector<double>> reals(const std::string& key) {
        const auto* n = node(key);
        if (!n) return std::nullopt;
        const auto* arr = n->as_array();
        if (!arr) type_error(key, "an array of numbers");
        std::vector<double> out;
        for (const auto& e : *arr) {
            if (auto v = e.value_exact<double>())
                out.push_back(*v);
            else if (auto i = e.value_exact<std::int64_t>())
                out.push_back(static_cast<double>(*i));
            else
                type_error(key, "an array of numbers");
        }
        return out;
    }

    std::optional<std::vector<std::string>> strings(const std::string& key) {
        const auto* n = node(key);
        if (!n) return std::nullopt;
        const auto* arr = n->as_array();
        if (!arr) type_error(key, "an array of strings");
        std::vector<std::string> out;
        for (const auto& e : *arr) {
            auto v = e.value_exact<std::string>();
            if (!v) type_error(key, "an array of strings");
            out.push_back(*v);
        }
        return out;
    }

    Section sub(const std::string& key) {
        const auto* n = node(key);
        if (n && !n->is_table()) type_error(key, "a table");
        return Section(n ? n->as_table() : nullptr, path_.empty() ? key : path_ + "." + key);
    }

    void finish() const {
        if (!table_) return;
        for (const auto& [k, v] : *table_) {
            const std::string key(k.str());
            if (!used_.count(key)) throw_usage("E_USAGE_CONFIG_KEY", "unknown configuration key '" + qualified(key) + "'");
        }
    }

    [[noreturn]] void type_error(const std::string& key, const std::string& expected) const {
        throw_usage("E_USAGE_CONFIG_TYPE", "configuration key '" + qualified(key) + "' must be " + expected);
    }

    std::string qualified(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    const toml::table* table_;
    std::string path_;
    std::set<std::string> used_;
};

template <class T>
void assign(std::optional<T> v, T& target) {
    if (v) target = *v;
}

int to_int(std::optional<std::int64_t> v, int fallback, const char* what) {
    if (!v) return fallback;
    if (*v < std::numeric_limits<int>::min() || *v > std::numeric_limits<int>::max())
        throw_usage("E_USAGE_CONFIG_RANGE", std::string(what) + " is out of range");
    return static_cast<int>(*v);
}

std::size_t to_size(std::optional<std::int64_t> v, std::size_t fallback, const char* what) {
    if (!v) return fallback;
    if (*v < 0) throw_usage("E_USAGE_CONFIG_RANGE", std::string(what) + " must be non-negative");
    return static_cast<std::size_t>(*v);
}

toml::table parse_toml(std::string_view text, const std::string& source) {
    try {
        return toml::parse(text, source);
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << source << ": line " << e.source().begin.line << ": " << e.description();
        throw_usage("E_USAGE_CONFIG_SYNTAX", msg.str());
    }
}

SyntheticSpec read_synthetic(Section s) {
    SyntheticSpec spec;
    spec.n = to_size(s.integer("n"), spec.n, "synthetic.n");
    spec.p = to_size(s.integer("p"), spec.p, "synthetic.p");
    spec.groups = to_size(s.integer("groups"), spec.groups, "synthetic.groups");
    assign(s.real("rho"), spec.rho);
    if (const auto* n = s.node("correlation")) {
        const auto* rows = n->as_array();
        if (!rows) s.type_error("correlation", "an array of arrays of numbers");
        Eigen::MatrixXd c(static_cast<Eigen::Index>(rows->size()), static_cast<Eigen::Index>(rows->size()));
        for (std::size_t i = 0; i < rows->size(); ++i) {
            const auto* row = rows->get(i)->as_array();
            if (!row || row->size() != rows->size()) s.type_error("correlation", "a square array of arrays of numbers");
            for (std::size_t j = 0; j < row->size(); ++j) {
                const auto v = row->get(j)->value<double>();
                if (!v) s.type_error("correlation", "a square array of arrays of numbers");
                c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *v;
            }
        }
        spec.correlation = c;
    }
    if (auto t = s.string("truth")) spec.truth = parse_truth(*t);
    assign(s.reals("beta"), spec.beta);
    assign(s.real("quadratic_coefficient"), spec.quadratic_coefficient);
    assign(s.real("noise_sd"), spec.noise_sd);
    if (auto seed = s.integer("seed")) {
        if (*seed < 0) throw_usage("E_USAGE_CONFIG_RANGE", "synthetic.seed must be non-negative");
        spec.seed = static_cast<std::uint64_t>(*seed);
    }
    s.finish();
    spec.validate();
    return spec;
}

void read_penalized(Section s, sweep::PenalizedSettings& ps) {
    ps.folds = to_int(s.integer("folds"), ps.folds, "penalized.folds");
    ps.lambda_count = to_size(s.integer("lambda_count"), ps.lambda_count, "penalized.lambda_count");
    assign(s.real("lambda_min_ratio"), ps.lambda_min_ratio);
    assign(s.boolean("one_se_rule"), ps.one_se_rule);
    assign(s.real("tolerance"), ps.fit.tolerance);
    ps.fit.max_sweeps = to_int(s.integer("max_sweeps"), ps.fit.max_sweeps, "penalized.max_sweeps");
    assign(s.boolean("standardize_covariates"), ps.fit.standardize_covariates);
    assign(s.real("newton_tolerance"), ps.fit.newton_tolerance);
    s.finish();
    if (!(ps.fit.tolerance > 0.0) || ps.fit.max_sweeps < 1 || !(ps.fit.newton_tolerance > 0.0))
        throw_usage("E_USAGE_CONFIG_RANGE", "penalized solver tolerances must be positive");
}

void read_wqs(Section s, wqs::WqsConfig& w) {
    w.q = to_int(s.integer("q"), w.q, "wqs.q");
    assign(s.real("train_fraction"), w.train_fraction);
    w.n_bootstrap = to_int(s.integer("n_bootstrap"), w.n_bootstrap, "wqs.n_bootstrap");
    if (auto dir = s.string("direction")) {
        if (*dir == "positive")
            w.direction = wqs::Direction::Positive;
        else if (*dir == "negative")
            w.direction = wqs::Direction::Negative;
        else
            throw_usage("E_USAGE_CONFIG_RANGE", "wqs.direction must be positive or negative");
    }
    if (auto tau = s.real("tau")) w.tau = *tau;
    w.max_iterations = to_int(s.integer("max_iterations"), w.max_iterations, "wqs.max_iterations");
    assign(s.real("gradient_tolerance"), w.gradient_tolerance);
    s.finish();
}

void read_bkmr(Section s, sweep::BkmrSettings& b) {
    auto& m = b.mcmc;
    m.n_iter = to_int(s.integer("n_iter"), m.n_iter, "bkmr.n_iter");
    if (auto burn = s.integer("burn_in")) m.burn_in = to_int(burn, 0, "bkmr.burn_in");
    m.n_chains = to_int(s.integer("n_chains"), m.n_chains, "bkmr.n_chains");
    assign(s.real("r_proposal_sd"), m.r_proposal_sd);
    assign(s.real("lam_proposal_sd"), m.lam_proposal_sd);
    m.grid_points = to_int(s.integer("grid_points"), m.grid_points, "bkmr.grid_points");
    m.thin = to_int(s.integer("thin"), m.thin, "bkmr.thin");
    m.max_n = to_size(s.integer("max_n"), m.max_n, "bkmr.max_n");
    if (auto sel = s.string("selection")) {
        if (*sel == "hierarchical")
            m.selection = bkmr::Selection::Hierarchical;
        else if (*sel == "all")
            m.selection = bkmr::Selection::AllActive;
        else if (*sel == "none")
            m.selection = bkmr::Selection::None;
        else
            throw_usage("E_USAGE_CONFIG_RANGE", "bkmr.selection must be hierarchical, all or none");
    }
    assign(s.real("jitter"), m.jitter);
    m.jitter_attempts = to_int(s.integer("jitter_attempts"), m.jitter_attempts, "bkmr.jitter_attempts");
    assign(s.real("rhat_threshold"), m.rhat_threshold);
    assign(s.boolean("curves"), b.curves);
    assign(s.reals("mixture_percentiles"), b.mixture_percentiles);

    Section pr = s.sub("priors");
    auto& p = m.priors;
    assign(pr.real("sigma2_shape"), p.sigma2_shape);
    assign(pr.real("sigma2_scale"), p.sigma2_scale);
    assign(pr.real("log_lam_min"), p.log_lam_min);
    assign(pr.real("log_lam_max"), p.log_lam_max);
    assign(pr.real("r_shape"), p.r_shape);
    assign(pr.real("r_rate"), p.r_rate);
    assign(pr.real("r_max"), p.r_max);
    assign(pr.real("group_inclusion"), p.group_inclusion);
    assign(pr.real("within_inclusion"), p.within_inclusion);
    pr.finish();
    s.finish();
}

RunConfig read_run(const toml::table& root, const std::filesystem::path& base_dir) {
    Section top(&root, "");
    RunConfig cfg;

    Section data = top.sub("data");
    Section synth = top.sub("synthetic");
    const auto* groups_node = top.node("groups");
    if (data.present() == synth.present())
        throw_usage("E_USAGE_CONFIG_SOURCE", "configure exactly one of [data] and [synthetic]");
    if (data.present()) {
        DataSource src;
        auto path = data.string("path");
        if (!path) throw_usage("E_USAGE_CONFIG_KEY", "data.path is required");
        src.path = std::filesystem::path(*path);
        if (src.path.is_relative()) src.path = base_dir / src.path;
        auto outcome = data.string("outcome");
        if (!outcome) throw_usage("E_USAGE_CONFIG_KEY", "data.outcome is required");
        src.roles.outcome = *outcome;
        auto exposures = data.strings("exposures");
        if (!exposures || exposures->empty()) throw_usage("E_USAGE_CONFIG_KEY", "data.exposures is required");
        src.roles.exposures = *exposures;
        assign(data.strings("covariates"), src.roles.covariates);
        data.finish();
        if (groups_node) {
            const auto* arr = groups_node->as_array();
            if (!arr || !arr->is_array_of_tables())
                throw_usage("E_USAGE_CONFIG_TYPE", "groups must be an array of tables ([[groups]])");
            for (std::size_t g = 0; g < arr->size(); ++g) {
                Section gs(arr->get(g)->as_table(), "groups[" + std::to_string(g) + "]");
                auto name = gs.string("name");
                auto members = gs.strings("members");
                if (!name || !members) throw_usage("E_USAGE_CONFIG_KEY", "every [[groups]] entry needs name and members");
                for (const auto& m : *members) src.roles.groups.emplace_back(m, *name);
                gs.finish();
            }
        }
        cfg.data = std::move(src);
    } else {
        if (groups_node)
            throw_usage("E_USAGE_CONFIG_KEY", "[[groups]] applies to [data]; synthetic data defines its own groups");
        cfg.synthetic = read_synthetic(synth);
    }

    Section sw = top.sub("sweep");
    if (auto model = sw.string("model")) cfg.sweep.model = sweep::parse_model(*model);
    if (const auto* seeds = sw.node("seeds")) {
        if (auto text = seeds->value_exact<std::string>()) {
            cfg.sweep.seeds = parse_seed_list(*text);
        } else if (const auto* arr = seeds->as_array()) {
            cfg.sweep.seeds.clear();
            for (const auto& e : *arr) {
                auto v = e.value_exact<std::int64_t>();
                if (!v || *v < 0) sw.type_error("seeds", "a range string or an array of non-negative integers");
                cfg.sweep.seeds.push_back(static_cast<std::uint64_t>(*v));
            }
        } else {
            sw.type_error("seeds", "a range string or an array of non-negative integers");
        }
    }
    cfg.sweep.jobs = to_int(sw.integer("jobs"), cfg.sweep.jobs, "sweep.jobs");
    sw.finish();

    read_penalized(top.sub("penalized"), cfg.sweep.penalized);
    read_wqs(top.sub("wqs"), cfg.sweep.wqs);
    read_bkmr(top.sub("bkmr"), cfg.sweep.bkmr);

    Section out = top.sub("output");
    if (auto dir = out.string("dir")) {
        cfg.out_dir = *dir;
        if (cfg.out_dir.is_relative()) cfg.out_dir = base_dir / cfg.out_dir;
    } else {
        cfg.out_dir = base_dir / cfg.out_dir;
    }
    if (auto f = out.string("format")) cfg.format = parse_format(*f);
    out.finish();

    top.finish();
    return cfg;
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir, const std::string& source) {
    const toml::table root = parse_toml(text, source);
    return read_run(root, base_dir);
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw_usage("E_USAGE_CONFIG_NOT_FOUND", "cannot open configuration file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    return parse_config(buf.str(), base, path.string());
}

SyntheticSpec parse_synthetic(std::string_view text, const std::string& source) {
    const toml::table root = parse_toml(text, source);
    Section top(&root, "");
    Section synth = top.sub("synthetic");
    if (!synth.present()) throw_usage("E_USAGE_CONFIG_SOURCE", source + " has no [synthetic] section");
    return read_synthetic(synth);
}

Dataset load_dataset(const RunConfig& config) {
    if (config.data) return load_csv(config.data->path, config.data->roles);
    if (config.synthetic) return generate_synthetic(*config.synthetic);
    throw_usage("E_USAGE_CONFIG_SOURCE", "configuration has no data source");
}

}  // namespace seedsweep::io
