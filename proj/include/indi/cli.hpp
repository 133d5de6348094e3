#pragma once

#include <string>
#include <vector>

namespace indi {

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_divergence = 3, exit_numerical = 4 };

/// Entry point of the `indiloop` tool. Output directory: --out, else the
/// INDILOOP_OUT environment variable, else ./indiloop_out.
int run_cli(int argc, char** argv);
int run_cli(const std::vector<std::string>& args);  ///< args[0] is the program name

}  // namespace indi
