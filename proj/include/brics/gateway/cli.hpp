#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace brics::gateway {

enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 1,       // bad flags, unreadable or unwritable files
    exit_diagnostics = 2, // output produced, but the input has problems
    exit_refactor = 3,
};

/// Runs one `brics` command line. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace brics::gateway
