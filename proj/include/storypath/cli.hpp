#pragma once

namespace storypath::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitSolver = 4;

/// Entry point of the `storypath` tool. Never throws.
int run(int argc, const char* const* argv);

}  // namespace storypath::cli
