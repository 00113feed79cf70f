#pragma once

#include <string>
#include <string_view>

#include "seedsweep/sweep/summary.hpp"
#include "seedsweep/sweep/sweep.hpp"

namespace seedsweep::io {

/// summary.json. Keys are sorted and the document ends with a newline, so
/// equal summaries serialize to identical bytes. Non-finite numbers are
/// written as the strings "inf", "-inf" and "nan".
std::string summary_to_json(const sweep::SweepSummary& summary);
sweep::SweepSummary summary_from_json(std::string_view text);

/// per_seed.json: the raw per-seed results, enough to re-run summarize.
std::string results_to_json(const sweep::SweepResult& result);
sweep::SweepResult results_from_json(std::string_view text);

}  // namespace seedsweep::io
