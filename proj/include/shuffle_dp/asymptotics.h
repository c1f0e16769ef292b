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

// Closed-form large-n quantities: the Gaussian DP parameter and curve, the
// Gaussian shift trade-off, and the leading terms of divergence expansions.

#ifndef SHUFFLE_DP_ASYMPTOTICS_H_
#define SHUFFLE_DP_ASYMPTOTICS_H_

#include <optional>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "shuffle_dp/channel.h"

namespace shuffle_dp {

enum class GdpSource {
  kCanonical,     // mu = sqrt(chi^2 / n)
  kProportional,  // mu = sqrt(I_pi / n)
  kUnbundled,     // mu = sqrt(m I_pi / n)
};

std::string_view GdpSourceName(GdpSource source);

struct GdpParams {
  double mu = 0.0;
  int n = 1;
  double pi = 0.0;
  int m = 1;
  GdpSource source = GdpSource::kCanonical;
};

// mu = sqrt(m I_pi / n); I_0 equals chi^2(W1 || W0). Needs a FULL channel.
absl::StatusOr<GdpParams> GdpMu(const Channel& ch, int n, double pi, int m = 1);

// delta(eps) = Phi(-eps/mu + mu/2) - e^eps Phi(-eps/mu - mu/2), 0 at mu = 0.
absl::StatusOr<double> GdpDelta(double eps, double mu);

// beta = Phi(Phi^{-1}(1 - alpha) - mu).
absl::StatusOr<double> GaussianTradeoff(double mu, double alpha);

struct ExpansionReport {
  std::optional<double> exact;
  double asymptotic = 0.0;
  std::vector<double> terms;
  std::optional<double> residual;  // exact - asymptotic
};

// JSD(T(n,0) || T(n,1)) ~ chi^2/(8n) - mu3/(16 n^2) + (7/64) chi^4 / n^2.
// When `fill_exact` is set and enumeration is feasible (binomial for d = 2,
// multinomial otherwise) the exact value and residual are filled in.
absl::StatusOr<ExpansionReport> JsdCanonicalAsymptotic(const Channel& ch,
                                                       int n,
                                                       bool fill_exact = true);

enum class DivergenceKind { kJsd, kFDivergence, kRenyi };

struct DivergenceSpec {
  DivergenceKind kind = DivergenceKind::kJsd;
  // f''(1) for kFDivergence, the order alpha for kRenyi.
  double parameter = 0.0;
};

// Leading-order value: JSD -> I/(8n), f-divergence -> f''(1) I/(2n),
// Renyi -> alpha I/(2n).
absl::StatusOr<double> LeadingDivergence(const Channel& ch, int n, double pi,
                                         DivergenceSpec spec);

}  // namespace shuffle_dp

#endif  // SHUFFLE_DP_ASYMPTOTICS_H_
