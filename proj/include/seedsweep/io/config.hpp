#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "seedsweep/core/dataset.hpp"
#include "seedsweep/io/csv.hpp"
#include "seedsweep/io/synthetic.hpp"
#include "seedsweep/sweep/sweep.hpp"

namespace seedsweep::io {

struct DataSource {
    std::filesystem::path path;  // resolved against the config file's directory
    ColumnRoles roles;
};

enum class OutputFormat { Csv, Json };

OutputFormat parse_format(const std::string& name);
std::string format_name(OutputFormat f);

/// A complete run: where the data comes from, what to fit, where to write.
struct RunConfig {
    std::optional<DataSource> data;
    std::optional<SyntheticSpec> synthetic;
    sweep::SweepConfig sweep;
    std::filesystem::path out_dir = "seedsweep-out";
    OutputFormat format = OutputFormat::Csv;
};

/**
 * Parses a TOML run configuration. Unknown keys, wrong value types and
 * out-of-range settings are usage errors; relative paths are resolved
 * against `base_dir`. Exactly one of [data] and [synthetic] is required.
 */
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir, const std::string& source);
RunConfig load_config(const std::filesystem::path& path);

/// The synthetic section alone (used by `synth`).
SyntheticSpec parse_synthetic(std::string_view text, const std::string& source);

Dataset load_dataset(const RunConfig& config);

/// "a..b" (inclusive) or a comma-separated list of unsigned 64-bit seeds.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

}  // namespace seedsweep::io
