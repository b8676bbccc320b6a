#pragma once

#include <iosfwd>

namespace nmsub::app {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitIo = 2,
  kExitVerification = 3,
};

/// Entry point of the `nmsub` tool; subcommands mssc, qp and trace-check.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nmsub::app
