#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chaleval {

/// Exit statuses of run_cli.
inline constexpr int exit_ok = 0;
inline constexpr int exit_invalid = 1;
inline constexpr int exit_input_error = 2;

/// Runs the command line (args excludes the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace chaleval
