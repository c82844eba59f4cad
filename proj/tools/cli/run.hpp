// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace hypokit::cli {

/// Entry point of the hypokit command line. Exit codes: 0 success,
/// 1 validation error, 2 numerical failure.
int run(int argc, const char* const* argv);

}  // namespace hypokit::cli
