#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kelly::cli {

/// Process exit codes.
enum ExitCode : int {
  kSuccess = 0,
  kUsage = 2,
  kIo = 3,
  kCheckFailed = 4,
};

inline constexpr int kSchemaVersion = 1;

/// Runs the command line `args` (args[0] is the program name). Primary output
/// goes to `out` unless --out DIR redirects it to files; diagnostics go to
/// `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kelly::cli
