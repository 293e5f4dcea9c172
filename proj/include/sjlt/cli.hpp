#pragma once

#include <iosfwd>

namespace sjlt::cli {

enum ExitCode : int {
  kOk              = 0,
  kValidationError = 1,
  kRuntimeError    = 2,
};

/// Default seed used by randomized subcommands when --seed is omitted. It is
/// echoed in their output.
inline constexpr unsigned long long kDefaultSeed = 20240607ULL;

/// Entry point for the `sjlt` tool: plan, build, transform, verify, bounds
/// and check subcommands.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

}  // namespace sjlt::cli
