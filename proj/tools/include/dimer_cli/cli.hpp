// cli.hpp - command-line front-end; kept in a library so tests can drive it in-process

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace dimer::cli {

enum ExitCode : int { kSuccess = 0, kRuntimeFailure = 1, kConfigError = 2 };

/// Parses `args` (without the program name) and runs the selected subcommand.
/// Primary artifacts go to `out` unless --out names a directory; diagnostics
/// and the effective-config echo go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dimer::cli
