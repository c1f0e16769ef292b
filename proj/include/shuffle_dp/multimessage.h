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

// Unbundled m-message shuffling: every user sends m independent messages
// through the same channel and all n*m messages are shuffled individually.
// For the canonical pair the likelihood ratio of a message histogram N is
//
//   L(N) = [t^m] prod_y (1 + w(y) t)^{N_y} / C(nm, m).

#ifndef SHUFFLE_DP_MULTIMESSAGE_H_
#define SHUFFLE_DP_MULTIMESSAGE_H_

#include <span>

#include "absl/status/statusor.h"
#include "shuffle_dp/channel.h"
#include "shuffle_dp/exact_dist.h"

namespace shuffle_dp {

// Requires delta_star > 0 and sum(N) = n * m.
absl::StatusOr<double> UnbundledLr(const Channel& ch, int n, int m,
                                   std::span<const int> histogram);

// Atomization of the canonical unbundled pair over all message histograms.
absl::StatusOr<LrAtomization> UnbundledAtoms(const Channel& ch, int n, int m,
                                             double atom_cap = kDefaultAtomCap);

absl::StatusOr<PrivacyCurve> UnbundledExactCurve(
    const Channel& ch, int n, int m, std::span<const double> eps_grid,
    double atom_cap = kDefaultAtomCap);

struct MmComparison {
  int m = 1;
  double chi2 = 0.0;
  double mu_unb_sq_times_n = 0.0;   // m chi^2
  double mu_bund_sq_times_n = 0.0;  // (1 + chi^2)^m - 1
  double ratio = 1.0;               // bundled / unbundled
  double ratio_lower_bound = 1.0;   // 1 + (m - 1) chi^2 / 2
  bool perfect_privacy = false;     // v = 0; ratio fields set to 1
};

absl::StatusOr<MmComparison> MmGdpCompare(const Channel& ch, int m);

}  // namespace shuffle_dp

#endif  // SHUFFLE_DP_MULTIMESSAGE_H_
