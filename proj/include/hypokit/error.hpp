// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hypokit {

enum class ErrorCode {
  invalid_argument = 1,
  insufficient_data,
  unsupported_domain,
  ill_conditioned_basis,
  numerical_failure,
  defective_case,
  invalid_epsilon,
  degenerate_witness,
  io_error,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception type thrown by every hypokit routine. The code is what the C
/// API hands back to callers; the message carries the diagnostics.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace hypokit
