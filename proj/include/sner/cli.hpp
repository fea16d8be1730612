#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace sner {

// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitNumerical = 3 };

// Runs the tool with args[0] as the program name. All output goes to the
// given streams, so the same entry point serves main() and in-process tests.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sner
