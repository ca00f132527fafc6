// fovtrace is licensed under the Apache License, Version 2.0.
// SPDX: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace fovtrace {

// Exception families map onto CLI exit codes: usage 1, io/parse 2, runtime 3.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : IoError {
  ParseError(const std::string& file, int line, const std::string& what)
      : IoError(file + ":" + std::to_string(line) + ": " + what), line_number(line) {}
  int line_number = 0;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fovtrace
