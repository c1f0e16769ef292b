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

#include "shuffle_dp/multimessage.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <limits>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "shuffle_dp/status_macros.h"

namespace shuffle_dp {
namespace {

// Above this log-magnitude the coefficients are carried as logarithms.
constexpr double kLogMagnitudeSwitch = 600.0;

double LogChoose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
         std::lgamma(n - k + 1.0);
}

// [t^m] prod_y (1 + w_y t)^{N_y}, truncated at degree m, in plain doubles.
double CoefficientDirect(const std::vector<double>& w,
                         std::span<const int> counts, int m) {
  std::vector<double> poly(m + 1, 0.0);
  poly[0] = 1.0;
  std::vector<double> factor(m + 1);
  std::vector<double> next(m + 1);
  for (size_t y = 0; y < w.size(); ++y) {
    if (counts[y] == 0 || w[y] == 0.0) continue;
    const int top = std::min(m, counts[y]);
    // C(N, j) w^j by the multiplicative recurrence.
    std::fill(factor.begin(), factor.end(), 0.0);
    factor[0] = 1.0;
    for (int j = 1; j <= top; ++j) {
      factor[j] = factor[j - 1] * w[y] * (counts[y] - j + 1) / j;
    }
    std::fill(next.begin(), next.end(), 0.0);
    for (int a = 0; a <= m; ++a) {
      if (poly[a] == 0.0) continue;
      for (int j = 0; j <= top && a + j <= m; ++j) {
        next[a + j] += poly[a] * factor[j];
      }
    }
    poly.swap(next);
  }
  return poly[m];
}

// Same coefficient, returned as its logarithm. All terms are nonnegative.
double LogCoefficient(const std::vector<double>& w, std::span<const int> counts,
                      int m) {
  const double kNegInf = -std::numeric_limits<double>::infinity();
  std::vector<double> poly(m + 1, kNegInf);
  poly[0] = 0.0;
  std::vector<double> factor(m + 1);
  std::vector<double> next(m + 1);
  std::vector<double> terms;
  for (size_t y = 0; y < w.size(); ++y) {
    if (counts[y] == 0 || w[y] == 0.0) continue;
    const int top = std::min(m, counts[y]);
    const double log_w = std::log(w[y]);
    for (int j = 0; j <= m; ++j) {
      factor[j] = j <= top ? LogChoose(counts[y], j) + j * log_w : kNegInf;
    }
    for (int s = 0; s <= m; ++s) {
      terms.clear();
      for (int j = 0; j <= std::min(s, top); ++j) {
        if (poly[s - j] == kNegInf) continue;
        terms.push_back(poly[s - j] + factor[j]);
      }
      if (terms.empty()) {
        next[s] = kNegInf;
        continue;
      }
      const double hi = *std::max_element(terms.begin(), terms.end());
      double sum = 0.0;
      for (double t : terms) sum += std::exp(t - hi);
      next[s] = hi + std::log(sum);
    }
    poly.swap(next);
  }
  return poly[m];
}

}  // namespace

absl::StatusOr<double> UnbundledLr(const Channel& ch, int n, int m,
                                   std::span<const int> histogram) {
  if (n < 1 || m < 1) {
    return absl::InvalidArgumentError("n and m must be >= 1");
  }
  if (ch.support() == SupportClass::kSingular) {
    return absl::InvalidArgumentError(
        "unbundled likelihood ratio needs W0(y) > 0 for every symbol");
  }
  if (static_cast<int>(histogram.size()) != ch.d()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "histogram has ", histogram.size(), " entries, channel has d = ",
        ch.d()));
  }
  long long total = 0;
  for (int c : histogram) {
    if (c < 0) return absl::InvalidArgumentError("negative histogram count");
    total += c;
  }
  const long long messages = static_cast<long long>(n) * m;
  if (total != messages) {
    return absl::InvalidArgumentError(absl::StrCat(
        "histogram sums to ", total, ", expected n * m = ", messages));
  }
  std::vector<double> w(ch.d());
  double log_w_abs = 0.0;
  double w_max = 0.0;
  for (int y = 0; y < ch.d(); ++y) {
    w[y] = ch.w1()[y] / ch.w0()[y];
    w_max = std::max(w_max, w[y]);
    if (w[y] > 0.0) log_w_abs = std::max(log_w_abs, std::abs(std::log(w[y])));
  }
  const int nm = static_cast<int>(messages);
  const double log_normalizer = LogChoose(nm, m);
  const bool use_logs =
      nm * std::log(std::max(w_max, 1.0)) > kLogMagnitudeSwitch ||
      log_normalizer + m * log_w_abs > kLogMagnitudeSwitch;
  double ratio;
  if (use_logs) {
    ratio = std::exp(LogCoefficient(w, histogram, m) - log_normalizer);
  } else {
    // C(nm, m) by the same multiplicative recurrence as the factors.
    double normalizer = 1.0;
    for (int j = 1; j <= m; ++j) normalizer = normalizer * (nm - j + 1) / j;
    ratio = CoefficientDirect(w, histogram, m) / normalizer;
  }
  if (m == 1) {
    double linear = 0.0;
    for (int y = 0; y < ch.d(); ++y) linear += histogram[y] * w[y];
    linear /= n;
    if (std::abs(linear - ratio) > 1e-10 * std::max(1.0, linear)) {
      return absl::InternalError(absl::StrCat(
          "m = 1 coefficient ", ratio, " disagrees with linear identity ",
          linear));
    }
  }
  return ratio;
}

absl::StatusOr<LrAtomization> UnbundledAtoms(const Channel& ch, int n, int m,
                                             double atom_cap) {
  if (n < 1 || m < 1) {
    return absl::InvalidArgumentError("n and m must be >= 1");
  }
  // Under the null all n*m messages are i.i.d. from W0.
  SHUFFLE_DP_ASSIGN_OR_RETURN(
      HistogramLaw law, ComputeHistogramLaw(ch, Composition{n * m, 0}, atom_cap));
  std::vector<LrAtom> raw;
  raw.reserve(law.size());
  for (size_t i = 0; i < law.size(); ++i) {
    const Histogram h = law.histogram(i);
    SHUFFLE_DP_ASSIGN_OR_RETURN(double ratio, UnbundledLr(ch, n, m, h));
    raw.push_back({ratio, law.prob(i), ratio * law.prob(i)});
  }
  return MergeAtoms(std::move(raw), 0, 1);
}

absl::StatusOr<PrivacyCurve> UnbundledExactCurve(
    const Channel& ch, int n, int m, std::span<const double> eps_grid,
    double atom_cap) {
  SHUFFLE_DP_ASSIGN_OR_RETURN(LrAtomization atoms,
                              UnbundledAtoms(ch, n, m, atom_cap));
  return ComputePrivacyCurve(atoms, eps_grid, Sidedness::kQOverP);
}

absl::StatusOr<MmComparison> MmGdpCompare(const Channel& ch, int m) {
  if (m < 1) return absl::InvalidArgumentError("m must be >= 1");
  if (ch.support() != SupportClass::kFull) {
    return absl::InvalidArgumentError(absl::StrCat(
        "bundled/unbundled comparison needs a FULL channel, got ",
        std::string(SupportClassName(ch.support()))));
  }
  SHUFFLE_DP_ASSIGN_OR_RETURN(ScoreStats stats, ComputeScoreStats(ch));
  MmComparison out;
  out.m = m;
  out.chi2 = stats.chi2;
  out.mu_unb_sq_times_n = m * stats.chi2;
  out.mu_bund_sq_times_n = std::expm1(m * std::log1p(stats.chi2));
  out.ratio_lower_bound = 1.0 + (m - 1) * stats.chi2 / 2.0;
  if (stats.chi2 == 0.0) {
    out.perfect_privacy = true;
    out.ratio = 1.0;
    out.ratio_lower_bound = 1.0;
    return out;
  }
  out.ratio = out.mu_bund_sq_times_n / out.mu_unb_sq_times_n;
  return out;
}

}  // namespace shuffle_dp
