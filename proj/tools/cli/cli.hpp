#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sentiflow::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kIo = 3,
};

/// Entry point behind the `sentiflow` binary. `args` excludes the program
/// name. Errors are reported to `err` as one line:
///   error: kind=<usage|config|io|input|endpoint|internal> message="..."
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sentiflow::cli
