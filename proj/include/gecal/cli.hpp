#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gecal::cli {

enum ExitCode : int {
  kOk = 0,
  kInternal = 1,
  kUsage = 2,
  kIo = 3,
  kFormat = 4,
  kOracle = 5,
  kProtocol = 6,
};

/// Runs one subcommand. `args` excludes the program name. Failures print one
/// line `gecal: error[<kind>]: <message>` to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Stops any `serve-mock` server running in this process. False if none was.
bool stop_servers();

}  // namespace gecal::cli
