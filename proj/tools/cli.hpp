#pragma once

namespace igl::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kInputError = 2,
  kNotConverged = 3,
};

/// Entry point shared by the `igl` binary and the CLI tests.
int run(int argc, const char* const* argv);

}  // namespace igl::cli
