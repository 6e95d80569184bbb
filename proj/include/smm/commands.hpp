#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace smm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitWarning = 1;  // finished, but some solve did not converge
inline constexpr int kExitUsage = 2;    // bad flags, unreadable input, invalid data

inline constexpr const char* kToolVersion = "1.0.0";

/// Runs the smmfit command line. `args` excludes the program name. Messages go
/// to `out` and `err`; the return value is the process exit code.
///
/// Commands: fit, simulate, generate, classify, metrics. Each writes its
/// outputs plus manifest.json into --out-dir, and only after all work has
/// succeeded.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace smm
