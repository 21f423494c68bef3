#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace verifact::cli {

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;  // bad flags, bad config, or a missing input file

/// Runs one command line (without the program name). Subcommands: index, verify, facts,
/// report, sample, label, serve-mock. The last line written to `out` is a JSON summary.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace verifact::cli
