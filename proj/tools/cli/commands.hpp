#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace geomag::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kComputationError = 3,
  kPartial = 4,
  kUnresolvable = 5,
};

/// Schema of the keys a command accepts. Throws std::invalid_argument for an
/// unknown command.
std::vector<KeySpec> command_schema(const std::string& command);
std::vector<std::string> command_names();

/// Runs a command on a fully loaded configuration. `console` receives the
/// default output (when `out` is empty or "-") and short reports; `log`
/// receives diagnostics.
int run_command(const std::string& command, const Config& config, std::ostream& console,
                std::ostream& log);

/// Entry point shared by the executable and the tests: parses argv-style
/// arguments, loads the config and maps errors onto exit codes.
int run(const std::vector<std::string>& args, std::ostream& console, std::ostream& log);

}  // namespace geomag::cli
