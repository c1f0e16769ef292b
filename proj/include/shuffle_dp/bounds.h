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

// Computable upper bounds on the one-sided curve of the canonical pair.

#ifndef SHUFFLE_DP_BOUNDS_H_
#define SHUFFLE_DP_BOUNDS_H_

#include "absl/status/statusor.h"
#include "shuffle_dp/channel.h"

namespace shuffle_dp {

struct ChernoffEvaluation {
  double eps = 0.0;
  double tau = 0.0;  // e^eps - 1
  // Minimizer of the log-bound; +inf when the exact curve is 0.
  double lambda_star = 0.0;
  // g(lambda_star), the natural log of the unclamped bound.
  double log_bound = 0.0;
  double bound = 1.0;  // min(1, e^log_bound)
};

// The Chernoff exponent
//   g(lambda) = -lambda n tau + (n - 1) log M(lambda) + log(M + M')(lambda),
// M(lambda) = E_W0[e^{lambda r}], evaluated in log space.
absl::StatusOr<double> ChernoffLogBound(const Channel& ch, int n, double eps,
                                        double lambda);

// Minimizes g over (0, 700 / max|r|]. Requires delta_star > 0.
absl::StatusOr<ChernoffEvaluation> ChernoffDelta(const Channel& ch, int n,
                                                 double eps);

struct HoeffdingEvaluation {
  double raw = 0.0;    // w_max^m exp(-2n (e^eps - 1)^2 / w_max^{2m})
  double bound = 1.0;  // min(1, raw)
  bool vacuous = false;
};

// U-statistic Hoeffding bound for unbundled m-message shuffling.
absl::StatusOr<HoeffdingEvaluation> UnbundledHoeffdingDelta(const Channel& ch,
                                                            int n, int m,
                                                            double eps);

}  // namespace shuffle_dp

#endif  // SHUFFLE_DP_BOUNDS_H_
