#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "seedsweep/io/config.hpp"
#include "seedsweep/sweep/summary.hpp"

namespace seedsweep::io {

/**
 * Writes a sweep's outputs into `dir`, creating it if needed.
 *
 * Always: summary.json and, when `result` is given, per_seed.json.
 * With the csv format, additionally the flat tables that apply to the model:
 *   lasso / group_lasso: coefficients.csv, lambda.csv, cv_curves.csv
 *   wqs:                 weights.csv, index_estimates.csv
 *   bkmr:                pips.csv, pip_table.txt, exposure_response.csv,
 *                        mixture_effect.csv, diagnostics.csv
 * and failures.csv. Returns the written paths in writing order.
 */
std::vector<std::filesystem::path> emit_outputs(const sweep::SweepSummary& summary, const sweep::SweepResult* result,
                                                const std::filesystem::path& dir, OutputFormat format);

/// Fixed-width text rendering of the PIP summary in the layout of a
/// min / median / max table: group rows, then conditional rows by group.
std::string pip_table_text(const sweep::PipSummary& pips);

/// Writes `content` to `path` byte for byte; I/O errors name the path.
void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

}  // namespace seedsweep::io
