#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fitch::cli {

enum ExitCode : int { kOk = 0, kTypeError = 1, kParseError = 2 };

/// Runs the command-line front end. `args` excludes the program name.
/// Results go to `out`, diagnostics to `err`; input is read from the named
/// file, or from `in` when no file (or "-") is given.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace fitch::cli
