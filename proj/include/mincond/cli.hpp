#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mincond::cli {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Default directory for command output when --output is not given.
inline constexpr const char* kOutputDirEnv = "MINCOND_OUTPUT_DIR";

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitParse = 3,
  kExitResourceLimit = 4,
};

/// Runs one command line (without the program name). Command output goes to
/// `out` unless written to a file; diagnostics go to `err`.
///
/// Commands: design, evaluate, verify, simulate-estimation,
/// simulate-monitoring, and replay (re-run a command from its manifest).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mincond::cli
