#pragma once

// Command-line front end. Subcommands: simulate, estimate, cv, eval, bench,
// rerun. Every command writes manifest.json next to its outputs; `rerun
// --manifest <file>` replays the recorded arguments.
//
// Exit codes: 0 success, 2 usage or validation error, 3 numerical failure.

#include <ostream>
#include <string>
#include <vector>

namespace sparsecov::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

inline constexpr const char* kLibraryVersion = "0.1.0";

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sparsecov::cli
