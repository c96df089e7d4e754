#pragma once

// The `cdd` command-line front end as a library, so tests can drive it
// without spawning processes.

#include <iosfwd>
#include <string>
#include <vector>

namespace cdd::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;      // usage, parse, domain, file errors
inline constexpr int kExitNumerical = 3;  // overflow, divergence, lost accuracy

/// `args` excludes the program name. Results go to `out` (or the -o file),
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cdd::cli
