#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace laminaplan {

/// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1; ///< a library error; JSON description on stderr
inline constexpr int kExitUsage = 2;   ///< bad flags or arguments

/**
 * Entry point of the `laminaplan` tool. `args` excludes the program name.
 *
 * On failure a single line {"error":{"code","message","path"}} goes to `err`.
 */
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace laminaplan
