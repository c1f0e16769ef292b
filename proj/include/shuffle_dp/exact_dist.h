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

// Exact finite-n laws of the shuffled histogram and everything derived from
// them: likelihood-ratio atomizations, privacy curves, trade-off curves,
// divergences and linearization residuals.
//
// Notation: T(n, k) is the law of the message histogram when n - k users
// report through W0 and k users through W1. The neighboring pair is
// P = T(n, k), Q = T(n, k + 1).

#ifndef SHUFFLE_DP_EXACT_DIST_H_
#define SHUFFLE_DP_EXACT_DIST_H_

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "shuffle_dp/channel.h"

namespace shuffle_dp {

inline constexpr double kDefaultAtomCap = 5e6;
// Likelihood ratios closer than this (relative) are merged into one atom.
inline constexpr double kRatioMergeTolerance = 1e-12;
// Binary-channel curves switch to log-space binomial weights above this n.
inline constexpr int kLogSpaceBinomialThreshold = 150;

struct Composition {
  int n = 1;
  int k = 0;

  static absl::StatusOr<Composition> Create(int n, int k);
  double pi() const { return static_cast<double>(k) / n; }
};

using Histogram = std::vector<int>;

// Number of histograms of n items over d symbols, C(n + d - 1, d - 1).
double HistogramCount(int n, int d);

// Encodes histograms of at most n items over d symbols as mixed-radix
// integers with base n + 1. Code order is the canonical histogram order.
class HistogramCodec {
 public:
  static absl::StatusOr<HistogramCodec> Create(int n, int d);

  uint64_t Encode(std::span<const int> h) const;
  Histogram Decode(uint64_t code) const;
  uint64_t unit(int y) const { return powers_[y]; }
  int count(uint64_t code, int y) const {
    return static_cast<int>((code / powers_[y]) % base_);
  }
  int d() const { return static_cast<int>(powers_.size()); }

 private:
  HistogramCodec(uint64_t base, std::vector<uint64_t> powers)
      : base_(base), powers_(std::move(powers)) {}
  uint64_t base_;
  std::vector<uint64_t> powers_;
};

// Exact probability table over histograms, in canonical order.
class HistogramLaw {
 public:
  HistogramLaw(HistogramCodec codec, int n, std::vector<uint64_t> codes,
               std::vector<double> probs, double renormalization);

  int n() const { return n_; }
  int d() const { return codec_.d(); }
  size_t size() const { return codes_.size(); }
  Histogram histogram(size_t i) const { return codec_.Decode(codes_[i]); }
  double prob(size_t i) const { return probs_[i]; }
  const std::vector<uint64_t>& codes() const { return codes_; }
  const std::vector<double>& probs() const { return probs_; }
  const HistogramCodec& codec() const { return codec_; }
  // |sum - 1| of the raw table before it was renormalized.
  double renormalization() const { return renormalization_; }

  // 0 for histograms outside the support.
  double Probability(std::span<const int> h) const;
  double ProbabilityOfCode(uint64_t code) const;

 private:
  HistogramCodec codec_;
  int n_;
  std::vector<uint64_t> codes_;
  std::vector<double> probs_;
  double renormalization_;
};

// Sequential user-by-user convolution: n - k users through W0 then k through
// W1. Fails with ResourceExhausted when the histogram count exceeds
// `atom_cap`.
absl::StatusOr<HistogramLaw> ComputeHistogramLaw(
    const Channel& ch, const Composition& comp,
    double atom_cap = kDefaultAtomCap);

// Per-histogram masses of the neighboring pair (T(n,k), T(n,k+1)).
class LikelihoodRatioTable {
 public:
  LikelihoodRatioTable(HistogramCodec codec, Composition comp,
                       std::vector<uint64_t> codes, std::vector<double> p_mass,
                       std::vector<double> q_mass)
      : codec_(std::move(codec)),
        comp_(comp),
        codes_(std::move(codes)),
        p_mass_(std::move(p_mass)),
        q_mass_(std::move(q_mass)) {}

  size_t size() const { return codes_.size(); }
  const HistogramCodec& codec() const { return codec_; }
  const Composition& composition() const { return comp_; }
  const std::vector<uint64_t>& codes() const { return codes_; }
  const std::vector<double>& p_mass() const { return p_mass_; }
  const std::vector<double>& q_mass() const { return q_mass_; }
  // Index of `code`, or -1.
  long Find(uint64_t code) const;

 private:
  HistogramCodec codec_;
  Composition comp_;
  std::vector<uint64_t> codes_;
  std::vector<double> p_mass_;
  std::vector<double> q_mass_;
};

// P(N) = sum_y W0(y) T(n-1,k)(N - e_y) and Q(N) = sum_y W1(y) T(n-1,k)(N - e_y)
// for every reachable N. Requires k <= n - 1.
absl::StatusOr<LikelihoodRatioTable> ComputeLikelihoodRatioTable(
    const Channel& ch, const Composition& comp,
    double atom_cap = kDefaultAtomCap);

struct LrAtom {
  double ratio = 1.0;  // L = dQ/dP, finite and >= 0
  double p_mass = 0.0;
  double q_mass = 0.0;
};

// A binary experiment (P, Q) compressed to its distinct likelihood ratios.
// Q-mass on P-null events (infinite privacy loss) is kept separately.
struct LrAtomization {
  std::vector<LrAtom> atoms;  // ascending in ratio, p_mass > 0
  double q_only_mass = 0.0;
  // Direction metadata: P = T(n, k_p), Q = T(n, k_q).
  int k_p = 0;
  int k_q = 1;

  // The swapped experiment (Q, P).
  LrAtomization Reversed() const;
  double TotalP() const;
  double TotalQ() const;
};

// Sorts by ratio, merges ties within kRatioMergeTolerance and moves P-null
// mass into q_only_mass.
LrAtomization MergeAtoms(std::vector<LrAtom> raw, int k_p, int k_q);

// Requires k <= n - 1. For k = 0 the result is cross-checked against the
// linear identity L = (1/n) sum_y N_y w(y).
absl::StatusOr<LrAtomization> ComputeLrAtoms(
    const Channel& ch, const Composition& comp,
    double atom_cap = kDefaultAtomCap);

// The canonical pair (k = 0) of a binary channel via Binomial(n, W0(1))
// weights, without multinomial enumeration.
absl::StatusOr<LrAtomization> BinomialCanonicalAtoms(const Channel& ch, int n);

enum class Sidedness { kQOverP, kPOverQ, kTwoSided };
std::string_view SidednessName(Sidedness s);
absl::StatusOr<Sidedness> ParseSidedness(std::string_view name);

struct CurvePoint {
  double epsilon = 0.0;
  double delta = 0.0;
};

struct PrivacyCurve {
  std::vector<CurvePoint> points;
  Sidedness sidedness = Sidedness::kQOverP;
};

// delta(eps) = E_P[(L - e^eps)_+] (+ Q-mass on P-null events), evaluated
// on an ascending nonnegative grid.
absl::StatusOr<PrivacyCurve> ComputePrivacyCurve(
    const LrAtomization& atoms, std::span<const double> eps_grid,
    Sidedness sidedness = Sidedness::kQOverP);

// One-sided curve delta_{T(n,1) || T(n,0)} of a binary channel as a
// one-dimensional binomial sum.
absl::StatusOr<PrivacyCurve> BinomialCurve(const Channel& ch, int n,
                                           std::span<const double> eps_grid);

struct DivergenceReport {
  double jsd = 0.0;
  double tv = 0.0;
  double chi2 = 0.0;  // chi^2(Q || P)
  double kl = 0.0;    // KL(Q || P)
  std::vector<double> renyi_orders;
  std::vector<double> renyi;  // D_alpha(Q || P)
};

// Pointwise JSD functional D(t), with D(0) = log(2) / 2.
double JsdPointwise(double t);

absl::StatusOr<DivergenceReport> ComputeDivergences(
    const LrAtomization& atoms, std::span<const double> renyi_orders = {});

struct TradeoffVertex {
  double alpha = 0.0;
  double beta = 1.0;
};

struct TradeoffCurve {
  std::vector<TradeoffVertex> vertices;  // ascending alpha

  // Piecewise-linear interpolation (randomized Neyman-Pearson tests).
  double Beta(double alpha) const;
};

// Neyman-Pearson sweep over atoms in descending likelihood ratio.
TradeoffCurve ComputeTradeoffCurve(const LrAtomization& atoms);

// U = L(N) - 1 = E[r(Y*) | N] for the changed user Y*.
absl::StatusOr<double> ConditionalScore(const Channel& ch,
                                        const Composition& comp,
                                        std::span<const int> histogram,
                                        double atom_cap = kDefaultAtomCap);

enum class ProportionConvention {
  kKOverNMinus1,  // pi_n = k / (n - 1)
  kKOverN,        // pi_n = k / n
};

struct ResidualSummary {
  double max_residual = 0.0;
  double rms_residual = 0.0;  // P-weighted over the window
  double outside_mass = 0.0;  // P-mass outside the window
  double window_radius = 0.0;
  double pi_used = 0.0;
  size_t histograms_in_window = 0;
};

// Compares U(N) with the linear score (1/n) s^T (N - E[N]), s = Sigma_pi^+ v,
// over histograms with ||N - E[N]||_inf <= window_mult * sqrt(n log n).
absl::StatusOr<ResidualSummary> LinearizationResidual(
    const Channel& ch, const Composition& comp, double window_mult,
    ProportionConvention convention = ProportionConvention::kKOverNMinus1,
    double atom_cap = kDefaultAtomCap);

}  // namespace shuffle_dp

#endif  // SHUFFLE_DP_EXACT_DIST_H_
