#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uwimg::cli {

/// Stable process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kIo = 2,
  kData = 3,
};

/// Runs the command line `args` (args[0] is the program name). Data goes to
/// `out`, diagnostics to `err`; returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace uwimg::cli
