#pragma once

#include <string>
#include <vector>

namespace badgeforge::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitModel = 3;
inline constexpr int kExitAcceptance = 4;

// Runs the CLI on the given arguments (excluding argv[0]) and returns the
// process exit code. Output files land in the --out directory; tables are
// echoed to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace badgeforge::cli
