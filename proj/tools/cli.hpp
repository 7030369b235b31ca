#pragma once

#include <iosfwd>

namespace gcsim {

/// Full command-line front end: parses argv, dispatches the subcommand, and
/// writes results to `out` and diagnostics to `err`. Returns the process exit
/// code: 0 success, 1 I/O failure, 2 validation failure, 3 internal
/// consistency failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace gcsim
