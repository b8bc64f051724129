#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pulsega::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitBelowThreshold = 2;

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pulsega::cli
