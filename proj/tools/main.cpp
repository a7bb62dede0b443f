// SPDX-License-Identifier: Apache-2.0
#include <vector>

#include "commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return sardet::cli::run_cli(args);
}
