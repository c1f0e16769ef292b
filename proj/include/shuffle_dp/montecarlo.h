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

// Sampling-based verification: privacy-loss samples, Kolmogorov distance to
// the Gaussian limit, rate fits, randomized-response boundary diagnostics
// and the frequency-estimation experiment.
//
// Every random draw is a pure function of (seed, sample index, draw index),
// so outputs do not depend on how samples are split across worker threads.

#ifndef SHUFFLE_DP_MONTECARLO_H_
#define SHUFFLE_DP_MONTECARLO_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "shuffle_dp/channel.h"
#include "shuffle_dp/exact_dist.h"

namespace shuffle_dp {

struct SimConfig {
  uint64_t seed = 0;
  int64_t reps = 0;
  int workers = 1;
};

// Counter-based generator: the j-th output of stream s under seed k is a
// fixed function of (k, s, j).
class CounterRng {
 public:
  CounterRng(uint64_t seed, uint64_t stream);

  uint64_t Next();
  // Uniform on [0, 1) with 53 random bits.
  double Uniform();

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

enum class Hypothesis { kP, kQ };
std::string_view HypothesisName(Hypothesis h);
absl::StatusOr<Hypothesis> ParseHypothesis(std::string_view name);

// Draws `cfg.reps` values of Lambda = log L(N) with N from P = T(n,k) or
// Q = T(n,k+1). k = 0 uses the linear identity; other k look up the exact
// ratio table and so inherit its enumeration cap.
absl::StatusOr<std::vector<double>> SamplePrivacyLoss(
    const Channel& ch, const Composition& comp, Hypothesis hypothesis,
    const SimConfig& cfg, double atom_cap = kDefaultAtomCap);

struct KolmogorovResult {
  double distance = 0.0;
  // DKW radius sqrt(log(2/gamma) / (2 reps)); 0 in exact mode.
  double dkw_radius = 0.0;
};

// Sup-distance between the law of (Lambda + mu^2/2)/mu under P (or
// (Lambda - mu^2/2)/mu under Q) and the standard normal.
absl::StatusOr<KolmogorovResult> KolmogorovFromSamples(
    std::span<const double> samples, double mu, Hypothesis hypothesis,
    double gamma = 0.05);

// Exact mode: evaluates both one-sided limits at every atom.
absl::StatusOr<KolmogorovResult> KolmogorovFromAtoms(const LrAtomization& atoms,
                                                     double mu,
                                                     Hypothesis hypothesis);

// Least-squares slope of log(value) against log(n).
absl::StatusOr<double> RateExponent(
    std::span<const std::pair<double, double>> points);

enum class RrRegime { kSubCritical, kCritical, kSuperCritical };
std::string_view RrRegimeName(RrRegime regime);

struct RegimeThresholds {
  double sub_below = 0.1;
  double super_above = 10.0;
};

struct RrBoundary {
  double eps0 = 0.0;
  int n = 1;
  double q_n = 0.5;
  double a_n = 0.0;  // e^eps0 / n
  double x_plus = 0.0;
  double x_minus = 0.0;
  double sigma2 = 0.0;
  double rho3 = 0.0;
  double lyapunov_bound = 0.0;  // 2 sqrt(a_n)
  // rho3 / sigma^3 and rho3 / (sigma^3 sqrt n); 0 when sigma = 0.
  double lyapunov_ratio = 0.0;
  double lyapunov_ratio_scaled = 0.0;
  RrRegime regime = RrRegime::kSubCritical;
};

absl::StatusOr<RrBoundary> ComputeRrBoundary(
    double eps0, int n, RegimeThresholds thresholds = RegimeThresholds());

struct FrequencyMseResult {
  int ones = 0;
  double q = 0.0;
  double p = 0.0;  // realized fraction ones / n
  double mse_estimate = 0.0;
  double mse_standard_error = 0.0;
  double mse_bound = 0.0;  // 1 / (4 n (1 - 2q)^2)
  double bias = 0.0;
  double bias_standard_error = 0.0;
};

// Monte Carlo MSE of the debiased randomized-response frequency estimator
// on a fixed dataset with round(p_true * n) ones.
absl::StatusOr<FrequencyMseResult> FrequencyMse(double eps0, int n,
                                                double p_true,
                                                const SimConfig& cfg);

}  // namespace shuffle_dp

#endif  // SHUFFLE_DP_MONTECARLO_H_
