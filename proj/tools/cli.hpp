#pragma once

#include <iosfwd>

namespace suge::cli {

enum ExitCode : int {
    kOk = 0,
    kRuntimeFailure = 1,
    kValidationFailure = 2,
};

/// Entry point shared by the `suge` binary and the CLI tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace suge::cli
