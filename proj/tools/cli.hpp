#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace grapeclose::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kFormatError = 2,
  kValidationError = 3,
  kComputationFailure = 4,
};

/// Runs one invocation; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace grapeclose::cli
