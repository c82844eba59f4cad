// SPDX-License-Identifier: Apache-2.0
#include "hypokit/error.hpp"

namespace hypokit {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::insufficient_data: return "insufficient-data";
    case ErrorCode::unsupported_domain: return "unsupported-domain";
    case ErrorCode::ill_conditioned_basis: return "ill-conditioned-basis";
    case ErrorCode::numerical_failure: return "numerical-failure";
    case ErrorCode::defective_case: return "defective-case";
    case ErrorCode::invalid_epsilon: return "invalid-epsilon";
    case ErrorCode::degenerate_witness: return "degenerate-witness";
    case ErrorCode::io_error: return "io-error";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace hypokit
