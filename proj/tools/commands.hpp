#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mlcd::cli {

/// Parses `args` (without the program name) and runs the chosen subcommand.
/// Returns the process exit code: 0 success, 2 input error, 3 precondition error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mlcd::cli
