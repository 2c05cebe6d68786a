#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pcsmono {

/// Exit codes: 0 success, 1 a checked inequality or saturation failed,
/// 2 malformed input, bad flags, or optimizer non-convergence.
enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitInputError = 2 };

/// Entry point of the pcsmono command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pcsmono
