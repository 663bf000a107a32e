#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flapkit::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 1,
  kInfeasible = 2,
  kNumericalFailure = 3,
};

/// Runs one command line (without the program name). Output goes to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flapkit::cli
