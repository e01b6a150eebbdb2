#pragma once

#include <string>
#include <vector>

namespace mgi::cli {

enum ExitCode : int {
    kOk = 0,
    kIoError = 1,
    kConfigError = 2,
    kUsageError = 3,
    kPreconditionError = 4,
};

inline constexpr const char* kToolVersion = "0.1.0";

// Runs one invocation; args excludes the program name.
int run_cli(const std::vector<std::string>& args);

} // namespace mgi::cli
