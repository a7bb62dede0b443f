// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sardet {

/// Bad argument or configuration value. CLI maps this to exit code 1.
class param_error : public std::invalid_argument {
public:
  explicit param_error(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Operation invoked on an object in the wrong state (e.g. eval-mode
/// batchnorm before any statistics were recorded).
class state_error : public std::logic_error {
public:
  explicit state_error(const std::string& msg) : std::logic_error(msg) {}
};

/// Tensor shape disagreement; the message names both shapes.
class shape_error : public std::invalid_argument {
public:
  explicit shape_error(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Malformed or truncated file. Carries the byte offset at which the
/// problem was detected. CLI maps this to exit code 2.
class format_error : public std::runtime_error {
public:
  format_error(const std::string& msg, std::uint64_t offset)
      : std::runtime_error(msg + " (byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::uint64_t offset() const { return offset_; }

private:
  std::uint64_t offset_;
};

/// Broken internal invariant. CLI maps this to exit code 3.
class internal_error : public std::logic_error {
public:
  explicit internal_error(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace sardet
