#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fockflow {

/// Process exit codes.
enum ExitCode : int {
  exit_ok = 0,            // success, or decide found a solution
  exit_no_solution = 1,   // decide: no solution in the window; oracle: none found
  exit_inconclusive = 2,  // decide could not certify either way
  exit_usage = 64,
  exit_data = 65,
  exit_numeric = 70,
};

/// Runs one command line (argv without the program name). Artifacts go to
/// the output directory; a one-line summary goes to `out`, diagnostics to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fockflow
