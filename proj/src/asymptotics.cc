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

#include "shuffle_dp/asymptotics.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "shuffle_dp/exact_dist.h"
#include "shuffle_dp/normal.h"
#include "shuffle_dp/simplex_linalg.h"
#include "shuffle_dp/status_macros.h"

namespace shuffle_dp {
namespace {

absl::StatusOr<double> FisherOrChi2(const Channel& ch, double pi) {
  if (ch.support() != SupportClass::kFull) {
    return absl::InvalidArgumentError(absl::StrCat(
        "asymptotic constants need a FULL channel, got ",
        std::string(SupportClassName(ch.support()))));
  }
  if (pi == 0.0) {
    SHUFFLE_DP_ASSIGN_OR_RETURN(ScoreStats stats, ComputeScoreStats(ch));
    return stats.chi2;
  }
  SHUFFLE_DP_ASSIGN_OR_RETURN(FisherReport fisher, FisherConstant(ch, pi));
  return fisher.I_pi;
}

}  // namespace

std::string_view GdpSourceName(GdpSource source) {
  switch (source) {
    case GdpSource::kCanonical:
      return "CANONICAL";
    case GdpSource::kProportional:
      return "PROPORTIONAL";
    case GdpSource::kUnbundled:
      return "UNBUNDLED";
  }
  return "UNKNOWN";
}

absl::StatusOr<GdpParams> GdpMu(const Channel& ch, int n, double pi, int m) {
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  if (m < 1) return absl::InvalidArgumentError("m must be >= 1");
  if (!(pi >= 0.0 && pi <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("pi must lie in [0, 1], got ", pi));
  }
  SHUFFLE_DP_ASSIGN_OR_RETURN(double fisher, FisherOrChi2(ch, pi));
  GdpParams params;
  params.n = n;
  params.pi = pi;
  params.m = m;
  params.mu = ch.IsIdentity() ? 0.0 : std::sqrt(m * fisher / n);
  if (m > 1) {
    params.source = GdpSource::kUnbundled;
  } else if (pi == 0.0) {
    params.source = GdpSource::kCanonical;
  } else {
    params.source = GdpSource::kProportional;
  }
  return params;
}

absl::StatusOr<double> GdpDelta(double eps, double mu) {
  if (!(eps >= 0.0) || !(mu >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("GDP curve needs eps >= 0 and mu >= 0, got eps = ", eps,
                     ", mu = ", mu));
  }
  if (mu == 0.0) return 0.0;
  if (std::isinf(eps)) return 0.0;
  const double a = -eps / mu;
  const double delta =
      NormalCdf(a + 0.5 * mu) - std::exp(eps) * NormalCdf(a - 0.5 * mu);
  return std::clamp(delta, 0.0, 1.0);
}

absl::StatusOr<double> GaussianTradeoff(double mu, double alpha) {
  if (!(mu >= 0.0)) {
    return absl::InvalidArgumentError(absl::StrCat("mu must be >= 0, got ", mu));
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("alpha must lie in [0, 1], got ", alpha));
  }
  if (mu == 0.0) return 1.0 - alpha;
  if (alpha == 0.0) return 1.0;
  if (alpha == 1.0) return 0.0;
  // Phi^{-1}(1 - alpha) = -Phi^{-1}(alpha) keeps precision for small alpha.
  return std::clamp(NormalCdf(-NormalQuantile(alpha) - mu), 0.0, 1.0);
}

absl::StatusOr<ExpansionReport> JsdCanonicalAsymptotic(const Channel& ch,
                                                       int n,
                                                       bool fill_exact) {
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  SHUFFLE_DP_ASSIGN_OR_RETURN(ScoreStats stats, ComputeScoreStats(ch));
  const double nn = static_cast<double>(n);
  ExpansionReport report;
  report.terms = {stats.chi2 / (8.0 * nn), -stats.mu3 / (16.0 * nn * nn),
                  (7.0 / 64.0) * stats.chi2 * stats.chi2 / (nn * nn)};
  for (double t : report.terms) report.asymptotic += t;
  if (!fill_exact) return report;

  absl::StatusOr<LrAtomization> atoms =
      ch.d() == 2 ? BinomialCanonicalAtoms(ch, n)
                  : ComputeLrAtoms(ch, Composition{n, 0});
  if (!atoms.ok()) {
    if (absl::IsResourceExhausted(atoms.status())) return report;
    return atoms.status();
  }
  SHUFFLE_DP_ASSIGN_OR_RETURN(DivergenceReport div, ComputeDivergences(*atoms));
  report.exact = div.jsd;
  report.residual = div.jsd - report.asymptotic;
  return report;
}

absl::StatusOr<double> LeadingDivergence(const Channel& ch, int n, double pi,
                                         DivergenceSpec spec) {
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  if (!(pi >= 0.0 && pi < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("pi must lie in [0, 1), got ", pi));
  }
  if (spec.kind == DivergenceKind::kRenyi && !(spec.parameter > 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Renyi order must exceed 1, got ", spec.parameter));
  }
  SHUFFLE_DP_ASSIGN_OR_RETURN(double fisher, FisherOrChi2(ch, pi));
  const double per_n = fisher / n;
  switch (spec.kind) {
    case DivergenceKind::kJsd:
      return per_n / 8.0;
    case DivergenceKind::kFDivergence:
      return 0.5 * spec.parameter * per_n;
    case DivergenceKind::kRenyi:
      return 0.5 * spec.parameter * per_n;
  }
  return absl::InternalError("unknown divergence kind");
}

}  // namespace shuffle_dp
