#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kbbm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitVerdictFailed = 2;

/// Runs one command line (args[0] is the program name). Human-readable
/// output goes to `out`, diagnostics to `err`; result files go to the
/// output directory. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Default output directory: $KBBM_OUTPUT_DIR, else "kbbm-out".
std::string default_output_dir();

}  // namespace kbbm::cli
