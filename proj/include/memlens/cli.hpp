#pragma once

#include <iosfwd>

namespace memlens {

/// Exit codes of the `memlens` tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitInputError = 1,
    kExitNoSamples = 2,
    kExitBudget = 3,
};

/// Entry point of `memlens analyze|synth|capacity|discretize`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace memlens
