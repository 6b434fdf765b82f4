#pragma once

#include <iosfwd>

namespace hamenc::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,  // verification or validation failure
  kUsage = 2,
  kIo = 3,
};

/// Parses argv and runs one subcommand: synth, train, extract, featurize,
/// classify, eval, end2end or verify.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hamenc::cli
