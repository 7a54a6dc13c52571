#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "dvca/nvd_client.hpp"

namespace dvca::cli {

// Stable exit-code contract.
enum ExitCode : int {
  kOk = 0,
  kIoError = 1,          // I/O, transport, unresolvable vectors
  kValidationError = 2,  // scenario/argument validation
  kComputeError = 3,     // pipeline failure, or non-convergence under --strict
};

struct Environment {
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
  // Overrides the HTTPS transport (tests inject a recording stub).
  std::shared_ptr<HttpTransport> transport;
};

int run(const std::vector<std::string>& args, const Environment& env);

}  // namespace dvca::cli
