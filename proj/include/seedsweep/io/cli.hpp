#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace seedsweep::io {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitModel = 3 };

/**
 * Entry point of the `seedsweep` tool. Subcommands: run, synth, summarize,
 * validate. Errors are printed to `err` as "error[CODE]: message" and
 * mapped to exit codes 1 (usage), 2 (data) and 3 (model or runtime).
 */
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, char** argv);

}  // namespace seedsweep::io
