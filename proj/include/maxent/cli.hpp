#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace maxent::cli {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kDataError = 2,
  kNonConvergence = 3,
};

/// Runs one invocation. argv[0] is the program name. Output artifacts go to --output
/// (written atomically) or to `out`; diagnostics go to `err`.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace maxent::cli
