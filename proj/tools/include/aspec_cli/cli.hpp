#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace aspec::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kViolation = 2 };

/// Runs the aspec command line.  `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace aspec::cli
