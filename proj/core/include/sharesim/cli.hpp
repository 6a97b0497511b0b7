#pragma once

#include <iosfwd>

namespace sharesim {

// Full command-line front end. Parses argv, runs the requested subcommand,
// writes data to `out` (or the file named by --output) and diagnostics to
// `err`. Returns the process exit code: 0 success, 2 usage error, 3 scenario
// parse/validation failure, 4 runtime error (non-convergence, unwritable
// output, ...).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sharesim
