#include "seedsweep/io/cli.hpp"

#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "seedsweep/core/error.hpp"
#include "seedsweep/io/config.hpp"
#include "seedsweep/io/csv.hpp"
#include "seedsweep/io/emit.hpp"
#include "seedsweep/io/serialize.hpp"
#include "seedsweep/io/synthetic.hpp"
#include "seedsweep/sweep/summary.hpp"
#include "seedsweep/sweep/sweep.hpp"

namespace seedsweep::io {

namespace {

struct Overrides {
    std::string seeds;
    std::string model;
    std::string out;
    std::optional<int> jobs;
    std::string format;
};

int jobs_from_env() {
    const char* env = std::getenv("SEEDSWEEP_JOBS");
    if (!env || !*env) return 0;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 4096) throw_usage("E_USAGE_JOBS", "SEEDSWEEP_JOBS must be a positive integer");
    return static_cast<int>(v);
}

// flags > SEEDSWEEP_JOBS > configuration file
void apply(const Overrides& o, RunConfig& cfg) {
    if (!o.seeds.empty()) cfg.sweep.seeds = parse_seed_list(o.seeds);
    if (!o.model.empty()) cfg.sweep.model = sweep::parse_model(o.model);
    if (!o.out.empty()) cfg.out_dir = o.out;
    if (!o.format.empty()) cfg.format = parse_format(o.format);
    if (const int env = jobs_from_env()) cfg.sweep.jobs = env;
    if (o.jobs) {
        if (*o.jobs < 1) throw_usage("E_USAGE_JOBS", "--jobs must be at least 1");
        cfg.sweep.jobs = *o.jobs;
    }
}

void add_overrides(CLI::App* cmd, Overrides& o, bool with_output) {
    cmd->add_option("--seeds", o.seeds, "Seeds as a..b (inclusive) or a comma list");
    cmd->add_option("--model", o.model, "lasso, group_lasso, wqs or bkmr");
    if (with_output) {
        cmd->add_option("--out", o.out, "Output directory");
        cmd->add_option("--jobs", o.jobs, "Worker threads (default: SEEDSWEEP_JOBS, then the config)");
        cmd->add_option("--format", o.format, "csv (JSON plus tables) or json (JSON only)");
    }
}

std::pair<RunConfig, Dataset> prepare(const std::string& config_path, const Overrides& o) {
    RunConfig cfg = load_config(config_path);
    apply(o, cfg);
    Dataset d = load_dataset(cfg);
    cfg.sweep.validate(d);
    return {std::move(cfg), std::move(d)};
}

void report(const sweep::SweepSummary& s, const std::vector<std::filesystem::path>& files,
            const std::filesystem::path& dir, std::ostream& out) {
    out << s.model << ": " << s.seeds.size() << " seeds succeeded, " << s.failures.size() << " failed\n";
    for (const auto& f : s.failures) out << "  seed " << f.seed << " failed: [" << f.code << "] " << f.message << '\n';
    if (s.diagnostics && s.diagnostics->flagged)
        out << "  " << s.diagnostics->flagged << " seeds flagged by the Gelman-Rubin check\n";
    out << "wrote " << files.size() << " files to " << dir.string() << '\n';
}

int cmd_run(const std::string& config_path, const Overrides& o, std::ostream& out) {
    auto [cfg, d] = prepare(config_path, o);
    const auto result = sweep::run_sweep(d, cfg.sweep);
    const auto summary = sweep::summarize(result);
    const auto files = emit_outputs(summary, &result, cfg.out_dir, cfg.format);
    report(summary, files, cfg.out_dir, out);
    return kExitOk;
}

int cmd_validate(const std::string& config_path, const Overrides& o, std::ostream& out) {
    auto [cfg, d] = prepare(config_path, o);
    out << "ok: model " << sweep::model_name(cfg.sweep.model) << ", n=" << d.n() << ", p=" << d.p()
        << ", covariates=" << d.c() << ", groups=" << d.groups.group_count() << ", seeds=" << cfg.sweep.seeds.size()
        << '\n';
    return kExitOk;
}

struct SynthFlags {
    std::string config;
    std::string out;
    std::optional<std::size_t> n, p, groups;
    std::optional<double> rho, noise_sd, quadratic;
    std::optional<std::uint64_t> seed;
    std::string truth;
    std::vector<double> beta;
};

int cmd_synth(const SynthFlags& f, std::ostream& out) {
    SyntheticSpec spec;
    if (!f.config.empty()) spec = parse_synthetic(read_text(f.config), f.config);
    if (f.n) spec.n = *f.n;
    if (f.p) spec.p = *f.p;
    if (f.groups) spec.groups = *f.groups;
    if (f.rho) spec.rho = *f.rho;
    if (f.noise_sd) spec.noise_sd = *f.noise_sd;
    if (f.quadratic) spec.quadratic_coefficient = *f.quadratic;
    if (f.seed) spec.seed = *f.seed;
    if (!f.truth.empty()) spec.truth = parse_truth(f.truth);
    if (!f.beta.empty()) spec.beta = f.beta;
    const Dataset d = generate_synthetic(spec);
    write_dataset(d, f.out);
    out << "wrote " << d.n() << " rows (" << d.p() << " exposures in " << d.groups.group_count() << " groups) to "
        << f.out << '\n';
    return kExitOk;
}

int cmd_summarize(const std::string& in, const Overrides& o, std::ostream& out) {
    std::filesystem::path path(in);
    if (std::filesystem::is_directory(path)) path /= "per_seed.json";
    const auto result = results_from_json(read_text(path));
    const auto summary = sweep::summarize(result);
    const auto dir = o.out.empty() ? (path.has_parent_path() ? path.parent_path() : std::filesystem::path(".")) : std::filesystem::path(o.out);
    const auto format = o.format.empty() ? OutputFormat::Csv : parse_format(o.format);
    // per_seed.json is the input here; it is not rewritten
    const auto files = emit_outputs(summary, nullptr, dir, format);
    report(summary, files, dir, out);
    return kExitOk;
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Usage: return kExitUsage;
        case ErrorKind::Data: return kExitData;
        case ErrorKind::Model: return kExitModel;
    }
    return kExitModel;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-seed sensitivity sweeps for mixture-exposure models", "seedsweep"};
    app.require_subcommand(1);

    std::string config;
    Overrides run_o, validate_o, summarize_o;
    auto* run = app.add_subcommand("run", "Run a sweep from a configuration file");
    run->add_option("--config", config, "TOML configuration file")->required();
    add_overrides(run, run_o, true);

    auto* validate = app.add_subcommand("validate", "Check a configuration and its data without fitting");
    validate->add_option("--config", config, "TOML configuration file")->required();
    add_overrides(validate, validate_o, false);

    SynthFlags sf;
    auto* synth = app.add_subcommand("synth", "Write a synthetic dataset as CSV");
    synth->add_option("--config", sf.config, "TOML file with a [synthetic] section");
    synth->add_option("--out", sf.out, "Output CSV path")->required();
    synth->add_option("--n", sf.n, "Observations");
    synth->add_option("--p", sf.p, "Exposures");
    synth->add_option("--groups", sf.groups, "Exposure groups");
    synth->add_option("--rho", sf.rho, "Exchangeable exposure correlation");
    synth->add_option("--truth", sf.truth, "null, linear or quadratic-single");
    synth->add_option("--beta", sf.beta, "Linear coefficients, one per exposure")->delimiter(',');
    synth->add_option("--quadratic", sf.quadratic, "Coefficient of the quadratic-single truth");
    synth->add_option("--noise-sd", sf.noise_sd, "Noise standard deviation");
    synth->add_option("--seed", sf.seed, "Generator seed");

    std::string in;
    auto* summarize = app.add_subcommand("summarize", "Re-aggregate saved per-seed results");
    summarize->add_option("--in", in, "per_seed.json or the directory holding it")->required();
    summarize->add_option("--out", summarize_o.out, "Output directory (default: next to the input)");
    summarize->add_option("--format", summarize_o.format, "csv or json");

    std::vector<std::string> argv_store;
    argv_store.reserve(args.size() + 1);
    argv_store.push_back("seedsweep");
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error[E_USAGE_ARGS]: " << e.what() << '\n';
        err << "run 'seedsweep --help' for usage\n";
        return kExitUsage;
    }

    try {
        if (run->parsed()) return cmd_run(config, run_o, out);
        if (validate->parsed()) return cmd_validate(config, validate_o, out);
        if (synth->parsed()) return cmd_synth(sf, out);
        if (summarize->parsed()) return cmd_summarize(in, summarize_o, out);
    } catch (const Error& e) {
        err << "error[" << e.code() << "]: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error[E_DATA_IO]: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "error[E_MODEL_INTERNAL]: " << e.what() << '\n';
        return kExitModel;
    }
    err << "error[E_USAGE_ARGS]: no subcommand given\n";
    return kExitUsage;
}

int cli_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cli_main(args, std::cout, std::cerr);
}

}  // namespace seedsweep::io
