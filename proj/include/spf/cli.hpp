#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace spf {

// Exit codes of the spf tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitData = 2,
  kExitVerification = 3,
};

// Runs the command line `args` (without the program name). Diagnostics go
// to `err` as "error: <category>: <message>".
int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err);

}  // namespace spf
