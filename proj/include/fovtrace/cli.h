// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace fovtrace {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitIo = 2, kExitRuntime = 3 };

// Runs `fovtrace render|bench|errmap|serve ...`; args[0] is the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fovtrace
