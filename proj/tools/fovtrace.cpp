// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#include <iostream>

#include "fovtrace/cli.h"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return fovtrace::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
