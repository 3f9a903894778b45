#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace musclework {

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitParse = 2, kExitSolver = 3 };

/// Runs the tool with argv-style arguments (args[0] is the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Path of a bundled data file (models, protocol, sessions).
std::string data_path(const std::string& name);

} // namespace musclework
