#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace reri::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitNumerical = 2;

// Subcommands: analyze, fit, simulate, check. Returns the process exit code.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace reri::cli
