#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qcsync::cli {

enum ExitCode { kOk = 0, kConfigError = 2, kPreconditionRefused = 3, kInternalError = 4 };

// `args` excludes the program name. Output goes to --out when given, else `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Shortest round-trip decimal.
std::string format_double(double v);

}  // namespace qcsync::cli
