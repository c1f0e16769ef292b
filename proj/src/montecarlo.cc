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

#include "shuffle_dp/montecarlo.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "shuffle_dp/normal.h"
#include "shuffle_dp/status_macros.h"

namespace shuffle_dp {
namespace {

constexpr uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

uint64_t Mix64(uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

absl::Status CheckConfig(const SimConfig& cfg) {
  if (cfg.reps < 0) return absl::InvalidArgumentError("reps must be >= 0");
  if (cfg.workers < 1) return absl::InvalidArgumentError("workers must be >= 1");
  return absl::OkStatus();
}

// Runs body(i) for i in [0, count) on `workers` threads with contiguous
// chunks.
void ParallelFor(int64_t count, int workers,
                 const std::function<void(int64_t)>& body) {
  workers = static_cast<int>(std::min<int64_t>(workers, std::max<int64_t>(count, 1)));
  if (workers <= 1) {
    for (int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> threads;
  threads.reserve(workers);
  const int64_t chunk = (count + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int64_t begin = w * chunk;
    const int64_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([begin, end, &body] {
      for (int64_t i = begin; i < end; ++i) body(i);
    });
  }
  for (auto& t : threads) t.join();
}

int SampleSymbol(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  const int y = static_cast<int>(it - cdf.begin());
  return std::min(y, static_cast<int>(cdf.size()) - 1);
}

std::vector<double> Cumulative(const std::vector<double>& row) {
  std::vector<double> cdf(row.size());
  double acc = 0.0;
  for (size_t y = 0; y < row.size(); ++y) {
    acc += row[y];
    cdf[y] = acc;
  }
  // Zero-mass trailing symbols must never be drawn.
  cdf.back() = std::numeric_limits<double>::infinity();
  for (size_t y = row.size(); y-- > 0;) {
    if (row[y] > 0.0) break;
    cdf[y] = std::numeric_limits<double>::infinity();
  }
  return cdf;
}

double Standardize(double lambda, double mu, Hypothesis hypothesis) {
  const double center = hypothesis == Hypothesis::kP ? -0.5 * mu * mu
                                                     : 0.5 * mu * mu;
  return (lambda - center) / mu;
}

}  // namespace

CounterRng::CounterRng(uint64_t seed, uint64_t stream)
    : key_(Mix64(seed ^ Mix64(stream * kGolden + 1))) {}

uint64_t CounterRng::Next() { return Mix64(key_ + kGolden * ++counter_); }

double CounterRng::Uniform() {
  return static_cast<double>(Next() >> 11) * 0x1.0p-53;
}

std::string_view HypothesisName(Hypothesis h) {
  return h == Hypothesis::kP ? "P" : "Q";
}

absl::StatusOr<Hypothesis> ParseHypothesis(std::string_view name) {
  if (name == "P" || name == "p") return Hypothesis::kP;
  if (name == "Q" || name == "q") return Hypothesis::kQ;
  return absl::InvalidArgumentError(
      absl::StrCat("hypothesis must be P or Q, got '", std::string(name), "'"));
}

absl::StatusOr<std::vector<double>> SamplePrivacyLoss(
    const Channel& ch, const Composition& comp, Hypothesis hypothesis,
    const SimConfig& cfg, double atom_cap) {
  SHUFFLE_DP_RETURN_IF_ERROR(CheckConfig(cfg));
  if (ch.support() != SupportClass::kFull) {
    return absl::InvalidArgumentError(
        "privacy-loss sampling needs a FULL channel");
  }
  SHUFFLE_DP_ASSIGN_OR_RETURN(Composition checked,
                              Composition::Create(comp.n, comp.k));
  if (checked.k > checked.n - 1) {
    return absl::InvalidArgumentError("neighboring pair needs k <= n - 1");
  }
  const int n = checked.n;
  const int d = ch.d();
  const int ones = checked.k + (hypothesis == Hypothesis::kQ ? 1 : 0);

  std::optional<LikelihoodRatioTable> table;
  if (checked.k > 0) {
    SHUFFLE_DP_ASSIGN_OR_RETURN(
        LikelihoodRatioTable t,
        ComputeLikelihoodRatioTable(ch, checked, atom_cap));
    table.emplace(std::move(t));
  }
  std::vector<double> w(d);
  for (int y = 0; y < d; ++y) w[y] = ch.w1()[y] / ch.w0()[y];
  const std::vector<double> cdf0 = Cumulative(ch.w0());
  const std::vector<double> cdf1 = Cumulative(ch.w1());

  std::vector<double> out(cfg.reps);
  std::vector<char> failed(cfg.reps, 0);
  ParallelFor(cfg.reps, cfg.workers, [&](int64_t i) {
    CounterRng rng(cfg.seed, static_cast<uint64_t>(i));
    std::vector<int> counts(d, 0);
    for (int u = 0; u < n; ++u) {
      const auto& cdf = u < n - ones ? cdf0 : cdf1;
      ++counts[SampleSymbol(cdf, rng.Uniform())];
    }
    double ratio;
    if (!table) {
      ratio = 0.0;
      for (int y = 0; y < d; ++y) ratio += counts[y] * w[y];
      ratio /= n;
    } else {
      const long idx = table->Find(table->codec().Encode(counts));
      if (idx < 0 || table->p_mass()[idx] <= 0.0) {
        failed[i] = 1;
        return;
      }
      ratio = table->q_mass()[idx] / table->p_mass()[idx];
    }
    out[i] = std::log(ratio);
  });
  if (std::find(failed.begin(), failed.end(), 1) != failed.end()) {
    return absl::InternalError("sampled histogram missing from exact table");
  }
  return out;
}

absl::StatusOr<KolmogorovResult> KolmogorovFromSamples(
    std::span<const double> samples, double mu, Hypothesis hypothesis,
    double gamma) {
  if (!(mu > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Kolmogorov distance needs mu > 0, got ", mu));
  }
  if (samples.empty()) {
    return absl::InvalidArgumentError("no samples");
  }
  if (!(gamma > 0.0 && gamma < 1.0)) {
    return absl::InvalidArgumentError("gamma must lie in (0, 1)");
  }
  std::vector<double> z(samples.size());
  for (size_t i = 0; i < samples.size(); ++i) {
    z[i] = Standardize(samples[i], mu, hypothesis);
  }
  std::sort(z.begin(), z.end());
  const double count = static_cast<double>(z.size());
  KolmogorovResult out;
  size_t i = 0;
  while (i < z.size()) {
    size_t j = i;
    while (j < z.size() && z[j] == z[i]) ++j;
    const double phi = NormalCdf(z[i]);
    out.distance = std::max(out.distance, std::abs(i / count - phi));
    out.distance = std::max(out.distance, std::abs(j / count - phi));
    i = j;
  }
  out.dkw_radius = std::sqrt(std::log(2.0 / gamma) / (2.0 * count));
  return out;
}

absl::StatusOr<KolmogorovResult> KolmogorovFromAtoms(const LrAtomization& atoms,
                                                     double mu,
                                                     Hypothesis hypothesis) {
  if (!(mu > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Kolmogorov distance needs mu > 0, got ", mu));
  }
  // Atoms are ascending in the ratio, hence in Lambda and in z. Ratio-0
  // atoms sit at z = -inf and the Q-only mass at z = +inf.
  KolmogorovResult out;
  double cdf = 0.0;
  for (const LrAtom& a : atoms.atoms) {
    const double mass = hypothesis == Hypothesis::kP ? a.p_mass : a.q_mass;
    if (mass <= 0.0) continue;
    const double z = a.ratio > 0.0
                         ? Standardize(std::log(a.ratio), mu, hypothesis)
                         : -std::numeric_limits<double>::infinity();
    const double phi = NormalCdf(z);
    out.distance = std::max(out.distance, std::abs(cdf - phi));
    cdf += mass;
    out.distance = std::max(out.distance, std::abs(cdf - phi));
  }
  if (hypothesis == Hypothesis::kQ && atoms.q_only_mass > 0.0) {
    out.distance = std::max(out.distance, std::abs(cdf - 1.0));
  }
  return out;
}

absl::StatusOr<double> RateExponent(
    std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) {
    return absl::InvalidArgumentError("rate fit needs at least 3 points");
  }
  double sx = 0.0;
  double sy = 0.0;
  for (const auto& [n, value] : points) {
    if (!(n > 0.0) || !(value > 0.0)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "rate fit needs positive n and values, got (", n, ", ", value, ")"));
    }
    sx += std::log(n);
    sy += std::log(value);
  }
  const double k = static_cast<double>(points.size());
  const double mx = sx / k;
  const double my = sy / k;
  double sxx = 0.0;
  double sxy = 0.0;
  for (const auto& [n, value] : points) {
    const double dx = std::log(n) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(value) - my);
  }
  if (sxx == 0.0) {
    return absl::InvalidArgumentError("rate fit needs distinct n values");
  }
  return sxy / sxx;
}

std::string_view RrRegimeName(RrRegime regime) {
  switch (regime) {
    case RrRegime::kSubCritical:
      return "SUB_CRITICAL";
    case RrRegime::kCritical:
      return "CRITICAL";
    case RrRegime::kSuperCritical:
      return "SUPER_CRITICAL";
  }
  return "UNKNOWN";
}

absl::StatusOr<RrBoundary> ComputeRrBoundary(double eps0, int n,
                                             RegimeThresholds thresholds) {
  if (!(eps0 >= 0.0) || !std::isfinite(eps0)) {
    return absl::InvalidArgumentError("eps0 must be finite and >= 0");
  }
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  RrBoundary b;
  b.eps0 = eps0;
  b.n = n;
  const double e = std::exp(eps0);
  b.q_n = 1.0 / (1.0 + e);
  b.a_n = e / n;
  b.x_plus = std::expm1(eps0);
  b.x_minus = std::expm1(-eps0);
  b.sigma2 = b.x_plus * b.x_plus / e;
  b.rho3 = b.x_plus * b.x_plus * b.x_plus * (1.0 + std::exp(-2.0 * eps0)) /
           (1.0 + e);
  b.lyapunov_bound = 2.0 * std::sqrt(b.a_n);
  if (b.sigma2 > 0.0) {
    b.lyapunov_ratio = b.rho3 / std::pow(b.sigma2, 1.5);
    b.lyapunov_ratio_scaled = b.lyapunov_ratio / std::sqrt(n);
  }
  if (b.a_n < thresholds.sub_below) {
    b.regime = RrRegime::kSubCritical;
  } else if (b.a_n > thresholds.super_above) {
    b.regime = RrRegime::kSuperCritical;
  } else {
    b.regime = RrRegime::kCritical;
  }
  return b;
}

absl::StatusOr<FrequencyMseResult> FrequencyMse(double eps0, int n,
                                                double p_true,
                                                const SimConfig& cfg) {
  SHUFFLE_DP_RETURN_IF_ERROR(CheckConfig(cfg));
  if (!(eps0 > 0.0) || !std::isfinite(eps0)) {
    return absl::InvalidArgumentError(
        "frequency estimation needs finite eps0 > 0 (q < 1/2)");
  }
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  if (!(p_true >= 0.0 && p_true <= 1.0)) {
    return absl::InvalidArgumentError("p_true must lie in [0, 1]");
  }
  if (cfg.reps < 2) {
    return absl::InvalidArgumentError("frequency MSE needs reps >= 2");
  }
  FrequencyMseResult out;
  out.q = 1.0 / (1.0 + std::exp(eps0));
  out.ones = static_cast<int>(std::lround(p_true * n));
  out.p = static_cast<double>(out.ones) / n;
  const double gap = 1.0 - 2.0 * out.q;
  out.mse_bound = 1.0 / (4.0 * n * gap * gap);

  std::vector<double> err(cfg.reps);
  ParallelFor(cfg.reps, cfg.workers, [&](int64_t i) {
    CounterRng rng(cfg.seed, static_cast<uint64_t>(i));
    int reported_ones = 0;
    for (int u = 0; u < n; ++u) {
      const bool bit = u < out.ones;
      const bool flip = rng.Uniform() < out.q;
      reported_ones += (bit != flip) ? 1 : 0;
    }
    const double estimate =
        (static_cast<double>(reported_ones) / n - out.q) / gap;
    err[i] = estimate - out.p;
  });
  double sum = 0.0;
  double sum_sq = 0.0;
  for (double e : err) {
    sum += e;
    sum_sq += e * e;
  }
  const double reps = static_cast<double>(cfg.reps);
  out.bias = sum / reps;
  out.mse_estimate = sum_sq / reps;
  double var_err = 0.0;
  double var_sq = 0.0;
  for (double e : err) {
    var_err += (e - out.bias) * (e - out.bias);
    const double s = e * e - out.mse_estimate;
    var_sq += s * s;
  }
  out.bias_standard_error = std::sqrt(var_err / (reps - 1.0) / reps);
  out.mse_standard_error = std::sqrt(var_sq / (reps - 1.0) / reps);
  return out;
}

}  // namespace shuffle_dp
