// SPDX-License-Identifier: Apache-2.0
// mwr-sim: multi-way massive MIMO relay network simulator

#pragma once

namespace mwr {

/// Full command-line entry point. Returns the process exit code:
/// 0 success, 2 invalid configuration, 3 oracle failure, 1 other errors.
int cli_main(int argc, const char* const* argv);

}  // namespace mwr
