// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vdpost::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kEndpoint = 3 };

/// Runs one command line (without the program name). Progress goes to `out`,
/// diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace vdpost::cli
