#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace matchfn {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitIo = 1,
  kExitValidation = 2,
  kExitDegraded = 3,    // more than 20% of observations clamped at a support edge
  kExitEstimation = 4,  // no local support, LASSO non-convergence
};

/// Runs one command line (args excludes the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace matchfn
