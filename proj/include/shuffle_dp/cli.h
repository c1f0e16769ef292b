// Copyright 2026 The shuffle_dp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Subcommands: curve, report, simulate.
//
// Exit codes: 0 success, 2 invalid input, 3 enumeration cap exceeded,
// 4 internal invariant violation.

#ifndef SHUFFLE_DP_CLI_H_
#define SHUFFLE_DP_CLI_H_

#include <ostream>

#include "absl/status/status.h"

namespace shuffle_dp {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitResourceCap = 3;
inline constexpr int kExitInternal = 4;

int ExitCodeForStatus(const absl::Status& status);

// Runs one command. Results go to `out` (or to --output files), diagnostics
// to `err`.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace shuffle_dp

#endif  // SHUFFLE_DP_CLI_H_
