#pragma once

#include <string>
#include <vector>

namespace vsrboost::cli {

enum ExitCode { kOk = 0, kUsage = 1, kIo = 2, kBackend = 3 };

/// Runs the command line; args[0] is the program name.
int run(const std::vector<std::string>& args);

}  // namespace vsrboost::cli
