#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tt::cli {

enum ExitCode : int {
  kCompleted = 0,
  kViolation = 1,   // a validator found a violation
  kInputError = 2,  // unreadable or invalid input, bad flags
};

/// Runs the command line `args` (args[0] is the program name) and returns
/// the exit code. Reports go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tt::cli
