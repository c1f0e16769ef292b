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

#include "shuffle_dp/bounds.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "shuffle_dp/status_macros.h"

namespace shuffle_dp {
namespace {

constexpr double kGoldenWidth = 1e-10;
constexpr double kOverflowExponent = 700.0;
constexpr int kIncreasesToStop = 3;
constexpr int kMinHalvingExponent = -60;

// log sum_y weight(y) e^{lambda r(y)} over symbols with weight > 0.
double LogTilted(const std::vector<double>& weight, const std::vector<double>& r,
                 double lambda) {
  double hi = -std::numeric_limits<double>::infinity();
  for (size_t y = 0; y < r.size(); ++y) {
    if (weight[y] > 0.0) hi = std::max(hi, std::log(weight[y]) + lambda * r[y]);
  }
  double sum = 0.0;
  for (size_t y = 0; y < r.size(); ++y) {
    if (weight[y] > 0.0) {
      sum += std::exp(std::log(weight[y]) + lambda * r[y] - hi);
    }
  }
  return hi + std::log(sum);
}

struct Exponent {
  const Channel& ch;
  std::vector<double> r;
  int n;
  double tau;

  // M + M' = sum_y W0 (1 + r) e^{lambda r} = sum_y W1 e^{lambda r}.
  double operator()(double lambda) const {
    return -lambda * n * tau + (n - 1) * LogTilted(ch.w0(), r, lambda) +
           LogTilted(ch.w1(), r, lambda);
  }
};

absl::StatusOr<std::vector<double>> Scores(const Channel& ch) {
  if (ch.support() == SupportClass::kSingular) {
    return absl::InvalidArgumentError(
        "Chernoff bound needs W0(y) > 0 for every symbol");
  }
  std::vector<double> r(ch.d());
  for (int y = 0; y < ch.d(); ++y) r[y] = ch.w1()[y] / ch.w0()[y] - 1.0;
  return r;
}

}  // namespace

absl::StatusOr<double> ChernoffLogBound(const Channel& ch, int n, double eps,
                                        double lambda) {
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  if (!(eps >= 0.0)) return absl::InvalidArgumentError("eps must be >= 0");
  SHUFFLE_DP_ASSIGN_OR_RETURN(std::vector<double> r, Scores(ch));
  return Exponent{ch, std::move(r), n, std::expm1(eps)}(lambda);
}

absl::StatusOr<ChernoffEvaluation> ChernoffDelta(const Channel& ch, int n,
                                                 double eps) {
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  if (!(eps >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps must be nonnegative, got ", eps));
  }
  SHUFFLE_DP_ASSIGN_OR_RETURN(std::vector<double> r, Scores(ch));
  ChernoffEvaluation out;
  out.eps = eps;
  out.tau = std::expm1(eps);
  const double r_max = *std::max_element(r.begin(), r.end());
  if (out.tau >= r_max) {
    // U_n <= max r, so the exact curve vanishes here.
    out.lambda_star = std::numeric_limits<double>::infinity();
    out.log_bound = -std::numeric_limits<double>::infinity();
    out.bound = 0.0;
    return out;
  }
  double r_abs = 0.0;
  for (double x : r) r_abs = std::max(r_abs, std::abs(x));
  const double lambda_max = kOverflowExponent / r_abs;
  const Exponent g{ch, r, n, out.tau};

  // Bracket: halve below 1 while g keeps decreasing, double above 1 until
  // g rises three times in a row or the overflow guard is hit.
  std::vector<std::pair<double, double>> samples;
  samples.emplace_back(std::min(1.0, lambda_max), g(std::min(1.0, lambda_max)));
  for (int j = -1; j >= kMinHalvingExponent; --j) {
    const double lambda = std::ldexp(1.0, j);
    if (lambda >= samples.front().first) continue;
    const double value = g(lambda);
    const bool decreasing = value < samples.front().second;
    samples.insert(samples.begin(), {lambda, value});
    if (!decreasing) break;
  }
  int increases = 0;
  double lambda = samples.back().first;
  while (lambda < lambda_max && increases < kIncreasesToStop) {
    lambda = std::min(2.0 * lambda, lambda_max);
    const double value = g(lambda);
    increases = value > samples.back().second ? increases + 1 : 0;
    samples.emplace_back(lambda, value);
  }
  size_t best = 0;
  for (size_t i = 1; i < samples.size(); ++i) {
    if (samples[i].second < samples[best].second) best = i;
  }
  double lo = best == 0 ? 0.0 : samples[best - 1].first;
  double hi = best + 1 == samples.size() ? samples[best].first
                                         : samples[best + 1].first;

  // Golden-section search on [lo, hi].
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = g(x1);
  double f2 = g(x2);
  while (hi - lo > kGoldenWidth) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = g(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = g(x2);
    }
  }
  double lambda_star = f1 <= f2 ? x1 : x2;
  double g_star = std::min(f1, f2);
  if (samples[best].second < g_star) {
    lambda_star = samples[best].first;
    g_star = samples[best].second;
  }
  out.lambda_star = lambda_star;
  out.log_bound = g_star;
  out.bound = std::min(1.0, std::exp(g_star));
  return out;
}

absl::StatusOr<HoeffdingEvaluation> UnbundledHoeffdingDelta(const Channel& ch,
                                                            int n, int m,
                                                            double eps) {
  if (n < 1 || m < 1) {
    return absl::InvalidArgumentError("n and m must be >= 1");
  }
  if (!(eps >= 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps must be nonnegative, got ", eps));
  }
  if (ch.support() == SupportClass::kSingular) {
    return absl::InvalidArgumentError(
        "Hoeffding bound needs W0(y) > 0 for every symbol");
  }
  double w_max = 0.0;
  for (int y = 0; y < ch.d(); ++y) {
    w_max = std::max(w_max, ch.w1()[y] / ch.w0()[y]);
  }
  const double tau = std::expm1(eps);
  const double log_raw = m * std::log(w_max) -
                         2.0 * n * tau * tau / std::pow(w_max, 2.0 * m);
  HoeffdingEvaluation out;
  out.raw = std::exp(log_raw);
  out.bound = std::min(1.0, out.raw);
  out.vacuous = out.raw >= 1.0;
  return out;
}

}  // namespace shuffle_dp
