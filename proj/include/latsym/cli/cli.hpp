#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace latsym::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Runs one `latsym` invocation. `args` excludes the program name. Human
/// output (or the JSON report with --json) goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace latsym::cli
