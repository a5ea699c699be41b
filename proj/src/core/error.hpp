// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace wm {

enum class ErrorKind {
  invalid_argument,
  range,
  io,
  parse,
  undefined_correlation,
  calibration_failed,
  not_initialized,
  internal,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), errorKind(kind) {}

    ErrorKind kind() const noexcept { return errorKind; }

  private:
    ErrorKind errorKind;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string &message) {
    throw Error(kind, message);
}

} // namespace wm
