// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace sardet::cli {

/// Full command-line entry point (argv without the program name).
/// Returns the process exit code: 0 success, 1 usage/parameter error,
/// 2 data/format error, 3 internal invariant violation.
int run_cli(const std::vector<std::string>& args);

}  // namespace sardet::cli
