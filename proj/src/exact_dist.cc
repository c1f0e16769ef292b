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

#include "shuffle_dp/exact_dist.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "shuffle_dp/simplex_linalg.h"
#include "shuffle_dp/status_macros.h"

namespace shuffle_dp {
namespace {

using SparseLaw = std::unordered_map<uint64_t, double>;

absl::Status CheckAtomCap(int n, int d, double atom_cap) {
  const double count = HistogramCount(n, d);
  if (count > atom_cap) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "exact enumeration needs about ", count, " histograms (n = ", n,
        ", d = ", d, "), above the cap of ", atom_cap,
        "; use the binomial engine (d = 2) or Monte Carlo sampling"));
  }
  return absl::OkStatus();
}

// One more user reporting through `row`.
SparseLaw AddUser(const SparseLaw& law, const std::vector<double>& row,
                  const HistogramCodec& codec) {
  SparseLaw next;
  next.reserve(law.size() * 2 + 1);
  for (const auto& [code, p] : law) {
    for (int y = 0; y < codec.d(); ++y) {
      if (row[y] == 0.0) continue;
      next[code + codec.unit(y)] += p * row[y];
    }
  }
  return next;
}

// Sparse law of n0 W0-users followed by n1 W1-users.
SparseLaw Convolve(const Channel& ch, int n0, int n1,
                   const HistogramCodec& codec) {
  SparseLaw law;
  law[0] = 1.0;
  for (int i = 0; i < n0; ++i) law = AddUser(law, ch.w0(), codec);
  for (int i = 0; i < n1; ++i) law = AddUser(law, ch.w1(), codec);
  return law;
}

// Sorted codes and probabilities; clamps round-off negatives and
// renormalizes. Returns |raw sum - 1|.
double Canonicalize(const SparseLaw& law, std::vector<uint64_t>& codes,
                    std::vector<double>& probs) {
  std::vector<std::pair<uint64_t, double>> entries(law.begin(), law.end());
  std::sort(entries.begin(), entries.end());
  codes.clear();
  probs.clear();
  codes.reserve(entries.size());
  probs.reserve(entries.size());
  double sum = 0.0;
  for (const auto& [code, p] : entries) {
    const double clamped = std::max(p, 0.0);
    codes.push_back(code);
    probs.push_back(clamped);
    sum += clamped;
  }
  if (sum > 0.0 && sum != 1.0) {
    for (double& p : probs) p /= sum;
  }
  return std::abs(sum - 1.0);
}

absl::Status CheckBinaryCanonical(const Channel& ch) {
  if (ch.d() != 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("binomial formulas need d = 2, got d = ", ch.d()));
  }
  if (ch.support() == SupportClass::kSingular) {
    return absl::InvalidArgumentError(
        "binomial formulas need W0(0), W0(1) > 0");
  }
  return absl::OkStatus();
}

double LogBinomialPmf(int n, int k, double log_p, double log_q) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
         std::lgamma(n - k + 1.0) + k * log_p + (n - k) * log_q;
}

// Binomial(n, p) pmf; direct products for small n, log space above the
// threshold.
std::vector<double> BinomialPmf(int n, double p) {
  std::vector<double> pmf(n + 1);
  if (n <= kLogSpaceBinomialThreshold) {
    double coeff = 1.0;
    for (int k = 0; k <= n; ++k) {
      pmf[k] = coeff * std::pow(p, k) * std::pow(1.0 - p, n - k);
      coeff = coeff * (n - k) / (k + 1);
    }
  } else {
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    for (int k = 0; k <= n; ++k) {
      pmf[k] = std::exp(LogBinomialPmf(n, k, log_p, log_q));
    }
  }
  return pmf;
}

double CanonicalBinaryRatio(int n, int k, double p0, double p1) {
  return (static_cast<double>(n - k) / n) * ((1.0 - p1) / (1.0 - p0)) +
         (static_cast<double>(k) / n) * (p1 / p0);
}

double LogSumExp(const std::vector<double>& terms) {
  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  const double hi = *std::max_element(terms.begin(), terms.end());
  if (!std::isfinite(hi)) return hi;
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - hi);
  return hi + std::log(sum);
}

}  // namespace

absl::StatusOr<Composition> Composition::Create(int n, int k) {
  if (n < 1) {
    return absl::InvalidArgumentError(absl::StrCat("n must be >= 1, got ", n));
  }
  if (k < 0 || k > n) {
    return absl::InvalidArgumentError(
        absl::StrCat("k must lie in [0, n] = [0, ", n, "], got ", k));
  }
  return Composition{n, k};
}

double HistogramCount(int n, int d) {
  return std::exp(std::lgamma(n + d) - std::lgamma(n + 1.0) -
                  std::lgamma(static_cast<double>(d)));
}

absl::StatusOr<HistogramCodec> HistogramCodec::Create(int n, int d) {
  if (n < 0 || d < 1) {
    return absl::InvalidArgumentError("histogram codec needs n >= 0, d >= 1");
  }
  const uint64_t base = static_cast<uint64_t>(n) + 1;
  if (d * std::log2(static_cast<double>(base)) > 62.0) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "histograms with n = ", n, ", d = ", d, " do not fit a 64-bit code"));
  }
  std::vector<uint64_t> powers(d);
  uint64_t p = 1;
  for (int y = 0; y < d; ++y) {
    powers[y] = p;
    p *= base;
  }
  return HistogramCodec(base, std::move(powers));
}

uint64_t HistogramCodec::Encode(std::span<const int> h) const {
  uint64_t code = 0;
  for (size_t y = 0; y < h.size(); ++y) code += powers_[y] * h[y];
  return code;
}

Histogram HistogramCodec::Decode(uint64_t code) const {
  Histogram h(powers_.size());
  for (size_t y = 0; y < powers_.size(); ++y) {
    h[y] = static_cast<int>(code % base_);
    code /= base_;
  }
  return h;
}

HistogramLaw::HistogramLaw(HistogramCodec codec, int n,
                           std::vector<uint64_t> codes,
                           std::vector<double> probs, double renormalization)
    : codec_(std::move(codec)),
      n_(n),
      codes_(std::move(codes)),
      probs_(std::move(probs)),
      renormalization_(renormalization) {}

double HistogramLaw::ProbabilityOfCode(uint64_t code) const {
  auto it = std::lower_bound(codes_.begin(), codes_.end(), code);
  if (it == codes_.end() || *it != code) return 0.0;
  return probs_[it - codes_.begin()];
}

double HistogramLaw::Probability(std::span<const int> h) const {
  if (static_cast<int>(h.size()) != d()) return 0.0;
  int total = 0;
  for (int c : h) {
    if (c < 0) return 0.0;
    total += c;
  }
  if (total != n_) return 0.0;
  return ProbabilityOfCode(codec_.Encode(h));
}

absl::StatusOr<HistogramLaw> ComputeHistogramLaw(const Channel& ch,
                                                 const Composition& comp,
                                                 double atom_cap) {
  SHUFFLE_DP_ASSIGN_OR_RETURN(Composition checked,
                              Composition::Create(comp.n, comp.k));
  SHUFFLE_DP_RETURN_IF_ERROR(CheckAtomCap(checked.n, ch.d(), atom_cap));
  SHUFFLE_DP_ASSIGN_OR_RETURN(HistogramCodec codec,
                              HistogramCodec::Create(checked.n, ch.d()));
  const SparseLaw law =
      Convolve(ch, checked.n - checked.k, checked.k, codec);
  std::vector<uint64_t> codes;
  std::vector<double> probs;
  const double renorm = Canonicalize(law, codes, probs);
  return HistogramLaw(std::move(codec), checked.n, std::move(codes),
                      std::move(probs), renorm);
}

long LikelihoodRatioTable::Find(uint64_t code) const {
  auto it = std::lower_bound(codes_.begin(), codes_.end(), code);
  if (it == codes_.end() || *it != code) return -1;
  return it - codes_.begin();
}

absl::StatusOr<LikelihoodRatioTable> ComputeLikelihoodRatioTable(
    const Channel& ch, const Composition& comp, double atom_cap) {
  SHUFFLE_DP_ASSIGN_OR_RETURN(Composition checked,
                              Composition::Create(comp.n, comp.k));
  if (checked.k > checked.n - 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "neighboring pair needs k <= n - 1, got n = ", checked.n,
        ", k = ", checked.k));
  }
  SHUFFLE_DP_RETURN_IF_ERROR(CheckAtomCap(checked.n, ch.d(), atom_cap));
  SHUFFLE_DP_ASSIGN_OR_RETURN(HistogramCodec codec,
                              HistogramCodec::Create(checked.n, ch.d()));

  // The n - 1 users other than the changed one.
  const SparseLaw rest =
      Convolve(ch, checked.n - 1 - checked.k, checked.k, codec);
  std::unordered_map<uint64_t, std::pair<double, double>> pq;
  pq.reserve(rest.size() * 2 + 1);
  for (const auto& [code, t] : rest) {
    for (int y = 0; y < ch.d(); ++y) {
      const double w0 = ch.w0()[y];
      const double w1 = ch.w1()[y];
      if (w0 == 0.0 && w1 == 0.0) continue;
      auto& slot = pq[code + codec.unit(y)];
      slot.first += w0 * t;
      slot.second += w1 * t;
    }
  }
  std::vector<std::pair<uint64_t, std::pair<double, double>>> entries(
      pq.begin(), pq.end());
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<uint64_t> codes;
  std::vector<double> p_mass;
  std::vector<double> q_mass;
  codes.reserve(entries.size());
  p_mass.reserve(entries.size());
  q_mass.reserve(entries.size());
  double p_sum = 0.0;
  double q_sum = 0.0;
  for (const auto& [code, masses] : entries) {
    codes.push_back(code);
    p_mass.push_back(std::max(masses.first, 0.0));
    q_mass.push_back(std::max(masses.second, 0.0));
    p_sum += p_mass.back();
    q_sum += q_mass.back();
  }
  for (double& p : p_mass) p /= p_sum;
  for (double& q : q_mass) q /= q_sum;
  return LikelihoodRatioTable(std::move(codec), checked, std::move(codes),
                              std::move(p_mass), std::move(q_mass));
}

LrAtomization LrAtomization::Reversed() const {
  std::vector<LrAtom> raw;
  raw.reserve(atoms.size() + 1);
  double next_q_only = 0.0;
  for (const LrAtom& a : atoms) {
    if (a.ratio > 0.0) {
      raw.push_back({1.0 / a.ratio, a.q_mass, a.p_mass});
    } else {
      // P-mass on Q-null events becomes infinite loss in the other direction.
      next_q_only += a.p_mass;
    }
  }
  if (q_only_mass > 0.0) raw.push_back({0.0, q_only_mass, 0.0});
  LrAtomization out = MergeAtoms(std::move(raw), k_q, k_p);
  out.q_only_mass += next_q_only;
  return out;
}

double LrAtomization::TotalP() const {
  double s = 0.0;
  for (const LrAtom& a : atoms) s += a.p_mass;
  return s;
}

double LrAtomization::TotalQ() const {
  double s = q_only_mass;
  for (const LrAtom& a : atoms) s += a.q_mass;
  return s;
}

LrAtomization MergeAtoms(std::vector<LrAtom> raw, int k_p, int k_q) {
  LrAtomization out;
  out.k_p = k_p;
  out.k_q = k_q;
  std::vector<LrAtom> finite;
  finite.reserve(raw.size());
  for (const LrAtom& a : raw) {
    if (a.p_mass > 0.0) {
      finite.push_back(a);
    } else {
      out.q_only_mass += a.q_mass;
    }
  }
  std::sort(finite.begin(), finite.end(),
            [](const LrAtom& a, const LrAtom& b) { return a.ratio < b.ratio; });
  for (const LrAtom& a : finite) {
    if (!out.atoms.empty()) {
      LrAtom& last = out.atoms.back();
      const double scale = std::max(std::abs(last.ratio), std::abs(a.ratio));
      if (std::abs(a.ratio - last.ratio) <= kRatioMergeTolerance * scale) {
        last.p_mass += a.p_mass;
        last.q_mass += a.q_mass;
        continue;
      }
    }
    out.atoms.push_back(a);
  }
  // Merged atoms carry the pooled ratio so that q = L p holds exactly.
  for (LrAtom& a : out.atoms) {
    if (a.q_mass == 0.0) {
      a.ratio = 0.0;
    } else {
      a.ratio = a.q_mass / a.p_mass;
    }
  }
  return out;
}

absl::StatusOr<LrAtomization> ComputeLrAtoms(const Channel& ch,
                                             const Composition& comp,
                                             double atom_cap) {
  SHUFFLE_DP_ASSIGN_OR_RETURN(LikelihoodRatioTable table,
                              ComputeLikelihoodRatioTable(ch, comp, atom_cap));
  const int n = table.composition().n;
  const bool canonical = table.composition().k == 0 &&
                         ch.support() != SupportClass::kSingular;
  std::vector<LrAtom> raw;
  raw.reserve(table.size());
  for (size_t i = 0; i < table.size(); ++i) {
    const double p = table.p_mass()[i];
    const double q = table.q_mass()[i];
    const double ratio = p > 0.0 ? q / p : 0.0;
    if (canonical && p > 0.0) {
      double linear = 0.0;
      for (int y = 0; y < ch.d(); ++y) {
        linear += table.codec().count(table.codes()[i], y) *
                  (ch.w1()[y] / ch.w0()[y]);
      }
      linear /= n;
      if (std::abs(linear - ratio) > 1e-10 * std::max(1.0, linear)) {
        return absl::InternalError(absl::StrCat(
            "canonical likelihood ratio mismatch: conditional form ", ratio,
            " vs linear identity ", linear));
      }
    }
    raw.push_back({ratio, p, q});
  }
  return MergeAtoms(std::move(raw), table.composition().k,
                    table.composition().k + 1);
}

absl::StatusOr<LrAtomization> BinomialCanonicalAtoms(const Channel& ch,
                                                     int n) {
  SHUFFLE_DP_RETURN_IF_ERROR(CheckBinaryCanonical(ch));
  if (n < 1) {
    return absl::InvalidArgumentError(absl::StrCat("n must be >= 1, got ", n));
  }
  const double p0 = ch.w0()[1];
  const double p1 = ch.w1()[1];
  const std::vector<double> pmf = BinomialPmf(n, p0);
  std::vector<LrAtom> raw;
  raw.reserve(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double ratio = CanonicalBinaryRatio(n, k, p0, p1);
    raw.push_back({ratio, pmf[k], ratio * pmf[k]});
  }
  return MergeAtoms(std::move(raw), 0, 1);
}

std::string_view SidednessName(Sidedness s) {
  switch (s) {
    case Sidedness::kQOverP:
      return "ONE_SIDED_Q_OVER_P";
    case Sidedness::kPOverQ:
      return "ONE_SIDED_P_OVER_Q";
    case Sidedness::kTwoSided:
      return "TWO_SIDED";
  }
  return "UNKNOWN";
}

absl::StatusOr<Sidedness> ParseSidedness(std::string_view name) {
  if (name == "q-over-p" || name == "ONE_SIDED_Q_OVER_P") {
    return Sidedness::kQOverP;
  }
  if (name == "p-over-q" || name == "ONE_SIDED_P_OVER_Q") {
    return Sidedness::kPOverQ;
  }
  if (name == "two-sided" || name == "TWO_SIDED") return Sidedness::kTwoSided;
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown sidedness '", std::string(name), "' (q-over-p, p-over-q, two-sided)"));
}

namespace {

absl::Status CheckGrid(std::span<const double> eps_grid) {
  for (size_t i = 0; i < eps_grid.size(); ++i) {
    if (!(eps_grid[i] >= 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("epsilon must be nonnegative, got ", eps_grid[i]));
    }
    if (i > 0 && eps_grid[i] < eps_grid[i - 1]) {
      return absl::InvalidArgumentError("epsilon grid must be ascending");
    }
  }
  return absl::OkStatus();
}

double OneSidedDelta(const LrAtomization& atoms, double eps) {
  const double threshold = std::exp(eps);
  double delta = atoms.q_only_mass;
  for (auto it = atoms.atoms.rbegin(); it != atoms.atoms.rend(); ++it) {
    if (it->ratio <= threshold) break;
    delta += it->q_mass - threshold * it->p_mass;
  }
  return std::clamp(delta, 0.0, 1.0);
}

}  // namespace

absl::StatusOr<PrivacyCurve> ComputePrivacyCurve(
    const LrAtomization& atoms, std::span<const double> eps_grid,
    Sidedness sidedness) {
  SHUFFLE_DP_RETURN_IF_ERROR(CheckGrid(eps_grid));
  PrivacyCurve curve;
  curve.sidedness = sidedness;
  curve.points.reserve(eps_grid.size());
  LrAtomization reversed;
  if (sidedness != Sidedness::kQOverP) reversed = atoms.Reversed();
  for (double eps : eps_grid) {
    double delta = 0.0;
    switch (sidedness) {
      case Sidedness::kQOverP:
        delta = OneSidedDelta(atoms, eps);
        break;
      case Sidedness::kPOverQ:
        delta = OneSidedDelta(reversed, eps);
        break;
      case Sidedness::kTwoSided:
        delta = std::max(OneSidedDelta(atoms, eps),
                         OneSidedDelta(reversed, eps));
        break;
    }
    curve.points.push_back({eps, delta});
  }
  return curve;
}

absl::StatusOr<PrivacyCurve> BinomialCurve(const Channel& ch, int n,
                                           std::span<const double> eps_grid) {
  SHUFFLE_DP_RETURN_IF_ERROR(CheckBinaryCanonical(ch));
  SHUFFLE_DP_RETURN_IF_ERROR(CheckGrid(eps_grid));
  if (n < 1) {
    return absl::InvalidArgumentError(absl::StrCat("n must be >= 1, got ", n));
  }
  const double p0 = ch.w0()[1];
  const double p1 = ch.w1()[1];
  PrivacyCurve curve;
  curve.sidedness = Sidedness::kQOverP;
  curve.points.reserve(eps_grid.size());
  if (n <= kLogSpaceBinomialThreshold) {
    const std::vector<double> pmf = BinomialPmf(n, p0);
    for (double eps : eps_grid) {
      const double threshold = std::exp(eps);
      double delta = 0.0;
      for (int k = 0; k <= n; ++k) {
        const double excess = CanonicalBinaryRatio(n, k, p0, p1) - threshold;
        if (excess > 0.0) delta += pmf[k] * excess;
      }
      curve.points.push_back({eps, std::clamp(delta, 0.0, 1.0)});
    }
    return curve;
  }
  const double log_p = std::log(p0);
  const double log_q = std::log1p(-p0);
  std::vector<double> log_weight(n + 1);
  for (int k = 0; k <= n; ++k) {
    log_weight[k] = LogBinomialPmf(n, k, log_p, log_q);
  }
  std::vector<double> terms;
  for (double eps : eps_grid) {
    const double threshold = std::exp(eps);
    terms.clear();
    for (int k = 0; k <= n; ++k) {
      const double excess = CanonicalBinaryRatio(n, k, p0, p1) - threshold;
      if (excess > 0.0) terms.push_back(log_weight[k] + std::log(excess));
    }
    const double delta = terms.empty() ? 0.0 : std::exp(LogSumExp(terms));
    curve.points.push_back({eps, std::clamp(delta, 0.0, 1.0)});
  }
  return curve;
}

double JsdPointwise(double t) {
  if (t == 0.0) return 0.5 * std::log(2.0);
  const double u = t - 1.0;
  return -0.5 * std::log1p(0.5 * u) + 0.5 * t * std::log1p(u / (2.0 + u));
}

absl::StatusOr<DivergenceReport> ComputeDivergences(
    const LrAtomization& atoms, std::span<const double> renyi_orders) {
  for (double alpha : renyi_orders) {
    if (!(alpha > 1.0) || !std::isfinite(alpha)) {
      return absl::InvalidArgumentError(
          absl::StrCat("Renyi order must be finite and > 1, got ", alpha));
    }
  }
  if (!renyi_orders.empty() && atoms.q_only_mass > 0.0) {
    return absl::InvalidArgumentError(
        "Renyi divergence is infinite: Q has mass where P vanishes");
  }
  DivergenceReport report;
  report.jsd = 0.5 * std::log(2.0) * atoms.q_only_mass;
  report.tv = atoms.q_only_mass;
  for (const LrAtom& a : atoms.atoms) {
    report.jsd += a.p_mass * JsdPointwise(a.ratio);
    if (a.ratio > 1.0) report.tv += a.q_mass - a.p_mass;
    report.chi2 += a.p_mass * (a.ratio - 1.0) * (a.ratio - 1.0);
    if (a.ratio > 0.0) report.kl += a.q_mass * std::log(a.ratio);
  }
  report.tv = std::clamp(report.tv, 0.0, 1.0);
  if (atoms.q_only_mass > 0.0) {
    report.chi2 = std::numeric_limits<double>::infinity();
    report.kl = std::numeric_limits<double>::infinity();
  }
  for (double alpha : renyi_orders) {
    double moment = 0.0;
    for (const LrAtom& a : atoms.atoms) {
      if (a.ratio > 0.0) moment += a.q_mass * std::pow(a.ratio, alpha - 1.0);
    }
    report.renyi_orders.push_back(alpha);
    report.renyi.push_back(std::log(moment) / (alpha - 1.0));
  }
  return report;
}

double TradeoffCurve::Beta(double alpha) const {
  if (vertices.empty()) return 1.0 - alpha;
  if (alpha <= vertices.front().alpha) {
    // Lowest beta among the vertices at alpha = 0.
    double best = vertices.front().beta;
    for (const auto& v : vertices) {
      if (v.alpha > vertices.front().alpha) break;
      best = std::min(best, v.beta);
    }
    return best;
  }
  for (size_t i = 1; i < vertices.size(); ++i) {
    const TradeoffVertex& a = vertices[i - 1];
    const TradeoffVertex& b = vertices[i];
    if (alpha <= b.alpha) {
      if (b.alpha == a.alpha) return std::min(a.beta, b.beta);
      const double t = (alpha - a.alpha) / (b.alpha - a.alpha);
      return a.beta + t * (b.beta - a.beta);
    }
  }
  return vertices.back().beta;
}

TradeoffCurve ComputeTradeoffCurve(const LrAtomization& atoms) {
  TradeoffCurve curve;
  curve.vertices.push_back({0.0, 1.0});
  double alpha = 0.0;
  double q_rejected = atoms.q_only_mass;
  if (q_rejected > 0.0) curve.vertices.push_back({0.0, 1.0 - q_rejected});
  for (auto it = atoms.atoms.rbegin(); it != atoms.atoms.rend(); ++it) {
    alpha += it->p_mass;
    q_rejected += it->q_mass;
    curve.vertices.push_back({std::clamp(alpha, 0.0, 1.0),
                              std::clamp(1.0 - q_rejected, 0.0, 1.0)});
  }
  // The full rejection region has alpha = 1, beta = 0 up to round-off.
  curve.vertices.back() = {1.0, 0.0};
  return curve;
}

absl::StatusOr<double> ConditionalScore(const Channel& ch,
                                        const Composition& comp,
                                        std::span<const int> histogram,
                                        double atom_cap) {
  SHUFFLE_DP_ASSIGN_OR_RETURN(Composition checked,
                              Composition::Create(comp.n, comp.k));
  if (checked.k > checked.n - 1) {
    return absl::InvalidArgumentError("conditional score needs k <= n - 1");
  }
  if (static_cast<int>(histogram.size()) != ch.d()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "histogram has ", histogram.size(), " entries, channel has d = ",
        ch.d()));
  }
  int total = 0;
  for (int c : histogram) {
    if (c < 0) return absl::InvalidArgumentError("negative histogram count");
    total += c;
  }
  if (total != checked.n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "histogram sums to ", total, ", expected n = ", checked.n));
  }
  SHUFFLE_DP_RETURN_IF_ERROR(CheckAtomCap(checked.n, ch.d(), atom_cap));
  SHUFFLE_DP_ASSIGN_OR_RETURN(HistogramCodec codec,
                              HistogramCodec::Create(checked.n, ch.d()));
  const SparseLaw rest =
      Convolve(ch, checked.n - 1 - checked.k, checked.k, codec);
  double p = 0.0;
  double q = 0.0;
  Histogram h(histogram.begin(), histogram.end());
  for (int y = 0; y < ch.d(); ++y) {
    if (h[y] == 0) continue;
    --h[y];
    auto it = rest.find(codec.Encode(h));
    ++h[y];
    if (it == rest.end()) continue;
    p += ch.w0()[y] * it->second;
    q += ch.w1()[y] * it->second;
  }
  if (!(p > 0.0)) {
    return absl::InvalidArgumentError(
        "histogram has zero probability under T(n, k)");
  }
  return q / p - 1.0;
}

absl::StatusOr<ResidualSummary> LinearizationResidual(
    const Channel& ch, const Composition& comp, double window_mult,
    ProportionConvention convention, double atom_cap) {
  if (ch.support() != SupportClass::kFull) {
    return absl::InvalidArgumentError(
        "linearization residual needs a FULL channel");
  }
  if (!(window_mult >= 0.0)) {
    return absl::InvalidArgumentError("window_mult must be nonnegative");
  }
  SHUFFLE_DP_ASSIGN_OR_RETURN(LikelihoodRatioTable table,
                              ComputeLikelihoodRatioTable(ch, comp, atom_cap));
  const int n = comp.n;
  const int k = comp.k;
  double pi = 0.0;
  if (convention == ProportionConvention::kKOverN) {
    pi = static_cast<double>(k) / n;
  } else if (n > 1) {
    pi = static_cast<double>(k) / (n - 1);
  }
  SHUFFLE_DP_ASSIGN_OR_RETURN(FisherReport fisher, FisherConstant(ch, pi));

  const int d = ch.d();
  std::vector<double> mean(d);
  for (int y = 0; y < d; ++y) {
    mean[y] = (n - k) * ch.w0()[y] + k * ch.w1()[y];
  }
  ResidualSummary summary;
  summary.pi_used = pi;
  summary.window_radius =
      window_mult * std::sqrt(n * std::log(static_cast<double>(n)));
  double in_mass = 0.0;
  double sq_sum = 0.0;
  for (size_t i = 0; i < table.size(); ++i) {
    const double p = table.p_mass()[i];
    if (p <= 0.0) continue;
    double sup_dev = 0.0;
    double linear = 0.0;
    for (int y = 0; y < d; ++y) {
      const double dev = table.codec().count(table.codes()[i], y) - mean[y];
      sup_dev = std::max(sup_dev, std::abs(dev));
      linear += fisher.s_pi(y) * dev;
    }
    if (sup_dev > summary.window_radius) {
      summary.outside_mass += p;
      continue;
    }
    const double score = table.q_mass()[i] / p - 1.0;
    const double residual = std::abs(score - linear / n);
    summary.max_residual = std::max(summary.max_residual, residual);
    sq_sum += p * residual * residual;
    in_mass += p;
    ++summary.histograms_in_window;
  }
  summary.rms_residual = in_mass > 0.0 ? std::sqrt(sq_sum / in_mass) : 0.0;
  return summary;
}

}  // namespace shuffle_dp
