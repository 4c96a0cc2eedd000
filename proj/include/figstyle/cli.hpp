#pragma once

#include <iosfwd>

namespace figstyle::cli {

// Exit codes: 0 success, 1 runtime failure, 2 configuration error, 3 data error.
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;

// Machine-readable results go to out; progress and diagnostics go to err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace figstyle::cli
