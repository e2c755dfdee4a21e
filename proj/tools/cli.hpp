#pragma once

#include <string>
#include <vector>

namespace flucast::cli
{

enum ExitCode : int {
    success           = 0,
    runtime_failure   = 1,
    usage_error       = 2,
    data_error        = 3,
    convergence_error = 4,
};

/// Environment variable naming a directory searched for relative --config / --scenario paths.
inline constexpr const char* config_dir_env = "FLUCAST_CONFIG_DIR";

/// Runs one of `fit`, `forecast`, `simulate`, `diagnose`. args excludes the program name.
int run_command(const std::vector<std::string>& args);

} // namespace flucast::cli
