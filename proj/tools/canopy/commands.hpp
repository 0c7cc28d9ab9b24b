#pragma once

#include <string>
#include <vector>

namespace canopy::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitUsage = 64;

const std::vector<std::string>& command_names();

/// Full command-line entry point; args[0] is the program name. Never throws;
/// returns the process exit code.
int run_cli(const std::vector<std::string>& args);

}  // namespace canopy::cli
