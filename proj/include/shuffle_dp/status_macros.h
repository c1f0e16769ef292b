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

#ifndef SHUFFLE_DP_STATUS_MACROS_H_
#define SHUFFLE_DP_STATUS_MACROS_H_

#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define SHUFFLE_DP_CONCAT_INNER_(x, y) x##y
#define SHUFFLE_DP_CONCAT_(x, y) SHUFFLE_DP_CONCAT_INNER_(x, y)

#define SHUFFLE_DP_RETURN_IF_ERROR(expr)           \
  do {                                             \
    const absl::Status _shuffle_dp_status = (expr); \
    if (!_shuffle_dp_status.ok()) {                \
      return _shuffle_dp_status;                   \
    }                                              \
  } while (0)

#define SHUFFLE_DP_ASSIGN_OR_RETURN_IMPL_(statusor, lhs, rexpr) \
  auto statusor = (rexpr);                                      \
  if (!statusor.ok()) {                                         \
    return statusor.status();                                   \
  }                                                             \
  lhs = std::move(statusor).value()

// Evaluates `rexpr` (an absl::StatusOr<T>), returns its status on error and
// otherwise moves the value into `lhs`.
#define SHUFFLE_DP_ASSIGN_OR_RETURN(lhs, rexpr) \
  SHUFFLE_DP_ASSIGN_OR_RETURN_IMPL_(            \
      SHUFFLE_DP_CONCAT_(_shuffle_dp_statusor_, __LINE__), lhs, rexpr)

#endif  // SHUFFLE_DP_STATUS_MACROS_H_
