#pragma once

#include <iosfwd>

namespace condnet::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kOk = 0,
    kUsage = 1,    // bad flags, width below the minimum, bad hyperparameters
    kData = 2,     // IO, schema, row, or model-format errors
    kNumeric = 3,  // non-finite loss or overflow
};

/// Runs `condnet <command> [flags]` and returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace condnet::cli
