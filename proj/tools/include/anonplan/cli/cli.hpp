#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace anonplan::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kAborted = 3,        ///< guard abort or infeasible LP
  kSolverFailure = 4,  ///< unbounded or iteration limit
};

/// Runs one command line (without the program name). Never throws.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace anonplan::cli
