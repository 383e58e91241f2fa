#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sunada::cli {

/// Process exit statuses.
///   0  every verdict passed
///   1  a pipeline ran and failed a verdict, or hit a numerical or resource limit
///   2  the command line or an input file was invalid
enum ExitStatus : int { exit_ok = 0, exit_failure = 1, exit_bad_config = 2 };

/// Runs one subcommand. `args` excludes the program name. Reports go to the
/// --out path (or `out` for "-"); on a non-zero status a one-line JSON
/// failure summary is written to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sunada::cli
