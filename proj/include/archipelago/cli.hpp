#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace archipelago {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitInternal = 1,
  kExitParse = 2,     // malformed arguments, expressions or config files
  kExitContract = 3,  // contract, mapping, unsupported, classification errors
  kExitResource = 4,  // word budget exceeded
};

/// Runs one command; `args` excludes the program name. Results go to `out`,
/// diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace archipelago
