#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace flexlp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAnalysis = 1;  // infeasible, unbounded, stalled, inseparable
inline constexpr int kExitInput = 2;     // bad flags, unreadable or invalid scene

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace flexlp::cli
