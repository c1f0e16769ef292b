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
#include <map>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.h"

namespace shuffle_dp {
namespace {

using ::shuffle_dp::testing::BruteForceLaw;
using ::shuffle_dp::testing::Identity2;
using ::shuffle_dp::testing::MakeChannel;
using ::shuffle_dp::testing::RandomFullChannel;
using ::shuffle_dp::testing::Rr;

const double kLn3 = std::log(3.0);

std::vector<double> LogGrid(double lo, double hi, int count) {
  std::vector<double> grid(count);
  for (int i = 0; i < count; ++i) {
    grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
  }
  return grid;
}

LrAtomization Atoms(const Channel& ch, int n, int k) {
  auto atoms = ComputeLrAtoms(ch, Composition{n, k});
  EXPECT_TRUE(atoms.ok()) << atoms.status();
  return *atoms;
}

// D(t) written directly from its definition.
double JsdDefinition(double t) {
  const double a = 0.5 * std::log(2.0 / (1.0 + t));
  const double b = t == 0.0 ? 0.0 : 0.5 * t * std::log(2.0 * t / (1.0 + t));
  return a + b;
}

TEST(CompositionTest, Validates) {
  EXPECT_TRUE(Composition::Create(3, 3).ok());
  EXPECT_FALSE(Composition::Create(0, 0).ok());
  EXPECT_FALSE(Composition::Create(3, 4).ok());
  EXPECT_FALSE(Composition::Create(3, -1).ok());
}

TEST(HistogramLawTest, SingleUserIsW0) {
  Channel ch = MakeChannel({0.2, 0.3, 0.5}, {0.6, 0.3, 0.1});
  auto law = ComputeHistogramLaw(ch, Composition{1, 0});
  ASSERT_TRUE(law.ok());
  ASSERT_EQ(law->size(), 3u);
  const std::vector<int> e2 = {0, 0, 1};
  EXPECT_NEAR(law->Probability(e2), 0.5, 1e-15);
}

TEST(HistogramLawTest, RandomizedResponseTwoUsers) {
  auto p = ComputeHistogramLaw(Rr(kLn3), Composition{2, 0});
  auto q = ComputeHistogramLaw(Rr(kLn3), Composition{2, 1});
  ASSERT_TRUE(p.ok());
  ASSERT_TRUE(q.ok());
  const std::vector<std::vector<int>> hs = {{2, 0}, {1, 1}, {0, 2}};
  const double p_expected[] = {9.0 / 16, 6.0 / 16, 1.0 / 16};
  const double q_expected[] = {3.0 / 16, 10.0 / 16, 3.0 / 16};
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(p->Probability(hs[i]), p_expected[i], 1e-15);
    EXPECT_NEAR(q->Probability(hs[i]), q_expected[i], 1e-15);
  }
  const std::vector<int> off = {3, 0};
  EXPECT_EQ(p->Probability(off), 0.0);
}

TEST(HistogramLawTest, MatchesTupleEnumeration) {
  std::mt19937_64 rng(11);
  for (int d : {2, 3}) {
    Channel ch = RandomFullChannel(rng, d);
    for (int n = 1; n <= 5; ++n) {
      for (int k = 0; k <= n; ++k) {
        auto law = ComputeHistogramLaw(ch, Composition{n, k});
        ASSERT_TRUE(law.ok());
        const auto oracle = BruteForceLaw(ch, n, k);
        ASSERT_EQ(law->size(), oracle.size());
        double total = 0.0;
        for (const auto& [h, p] : oracle) {
          EXPECT_NEAR(law->Probability(h), p, 1e-14);
        }
        for (size_t i = 0; i < law->size(); ++i) {
          int sum = 0;
          for (int c : law->histogram(i)) sum += c;
          EXPECT_EQ(sum, n);
          EXPECT_GE(law->prob(i), 0.0);
          total += law->prob(i);
        }
        EXPECT_NEAR(total, 1.0, 1e-12);
      }
    }
  }
}

TEST(HistogramLawTest, CapExceededIsResourceExhausted) {
  Channel ch = MakeChannel({0.25, 0.25, 0.25, 0.25}, {0.1, 0.2, 0.3, 0.4});
  auto law = ComputeHistogramLaw(ch, Composition{200, 0}, 1e4);
  EXPECT_EQ(law.status().code(), absl::StatusCode::kResourceExhausted);
}

TEST(LrAtomsTest, RandomizedResponseTwoUsers) {
  LrAtomization atoms = Atoms(Rr(kLn3), 2, 0);
  ASSERT_EQ(atoms.atoms.size(), 3u);
  const double ratio[] = {1.0 / 3, 5.0 / 3, 3.0};
  const double p[] = {9.0 / 16, 6.0 / 16, 1.0 / 16};
  const double q[] = {3.0 / 16, 10.0 / 16, 3.0 / 16};
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(atoms.atoms[i].ratio, ratio[i], 1e-14);
    EXPECT_NEAR(atoms.atoms[i].p_mass, p[i], 1e-15);
    EXPECT_NEAR(atoms.atoms[i].q_mass, q[i], 1e-15);
    EXPECT_LE(atoms.atoms[i].ratio, 3.0 + 1e-14);
    EXPECT_GE(atoms.atoms[i].ratio, 1.0 / 3 - 1e-14);
  }
  EXPECT_EQ(atoms.k_p, 0);
  EXPECT_EQ(atoms.k_q, 1);
}

TEST(LrAtomsTest, IdenticalChannelsGiveOneAtom) {
  LrAtomization atoms = Atoms(MakeChannel({0.2, 0.3, 0.5}, {0.2, 0.3, 0.5}), 4, 1);
  ASSERT_EQ(atoms.atoms.size(), 1u);
  EXPECT_NEAR(atoms.atoms[0].ratio, 1.0, 1e-12);
  EXPECT_NEAR(atoms.atoms[0].p_mass, 1.0, 1e-12);
  EXPECT_NEAR(atoms.atoms[0].q_mass, 1.0, 1e-12);
}

TEST(LrAtomsTest, RejectsLastComposition) {
  EXPECT_FALSE(ComputeLrAtoms(Rr(1.0), Composition{3, 3}).ok());
}

TEST(LrAtomsTest, MatchesTupleEnumerationForGeneralK) {
  std::mt19937_64 rng(3);
  for (int d : {2, 3}) {
    Channel ch = RandomFullChannel(rng, d);
    for (int n = 2; n <= 5; ++n) {
      for (int k = 0; k < n; ++k) {
        auto table = ComputeLikelihoodRatioTable(ch, Composition{n, k});
        ASSERT_TRUE(table.ok());
        const auto p_law = BruteForceLaw(ch, n, k);
        const auto q_law = BruteForceLaw(ch, n, k + 1);
        for (const auto& [h, p] : p_law) {
          const long idx = table->Find(table->codec().Encode(h));
          ASSERT_GE(idx, 0);
          EXPECT_NEAR(table->p_mass()[idx], p, 1e-14);
          EXPECT_NEAR(table->q_mass()[idx], q_law.at(h), 1e-14);
        }
      }
    }
  }
}

TEST(LrAtomsTest, MartingaleAndConsistency) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    Channel ch = RandomFullChannel(rng, 2 + trial % 3);
    const int n = 6 + trial;
    for (int k : {0, n / 2, n - 1}) {
      LrAtomization atoms = Atoms(ch, n, k);
      double mean_l = 0.0;
      double mean_inv = 0.0;
      for (size_t i = 0; i < atoms.atoms.size(); ++i) {
        const LrAtom& a = atoms.atoms[i];
        if (i > 0) EXPECT_GT(a.ratio, atoms.atoms[i - 1].ratio);
        EXPECT_NEAR(a.q_mass, a.ratio * a.p_mass, 1e-10 * a.q_mass + 1e-300);
        mean_l += a.ratio * a.p_mass;
        mean_inv += a.q_mass / a.ratio;
      }
      EXPECT_NEAR(atoms.TotalP(), 1.0, 1e-10);
      EXPECT_NEAR(atoms.TotalQ(), 1.0, 1e-10);
      EXPECT_NEAR(mean_l, 1.0, 1e-10);
      EXPECT_NEAR(mean_inv, 1.0, 1e-10);
    }
  }
}

TEST(LrAtomsTest, SingularChannelKeepsQOnlyMass) {
  // Symbol 2 is impossible under W0, so any histogram using it is P-null.
  Channel ch = MakeChannel({0.5, 0.5, 0.0}, {0.2, 0.3, 0.5});
  LrAtomization atoms = Atoms(ch, 3, 0);
  EXPECT_NEAR(atoms.q_only_mass, 0.5, 1e-14);
  EXPECT_NEAR(atoms.TotalP(), 1.0, 1e-14);
  auto curve = ComputePrivacyCurve(atoms, std::vector<double>{0.0, 5.0, 50.0});
  ASSERT_TRUE(curve.ok());
  for (const CurvePoint& pt : curve->points) EXPECT_GE(pt.delta, 0.5 - 1e-14);
}

TEST(PrivacyCurveTest, RandomizedResponseAnchors) {
  LrAtomization atoms = Atoms(Rr(kLn3), 2, 0);
  const std::vector<double> grid = {0.0, std::log(2.0), kLn3};
  auto curve = ComputePrivacyCurve(atoms, grid);
  ASSERT_TRUE(curve.ok());
  EXPECT_NEAR(curve->points[0].delta, 3.0 / 8, 1e-15);
  EXPECT_NEAR(curve->points[1].delta, 1.0 / 16, 1e-15);
  EXPECT_NEAR(curve->points[2].delta, 0.0, 1e-15);
}

TEST(PrivacyCurveTest, SidednessAndMonotonicity) {
  std::mt19937_64 rng(23);
  const std::vector<double> grid = LogGrid(1e-3, 10.0, 64);
  for (int trial = 0; trial < 6; ++trial) {
    Channel ch = RandomFullChannel(rng, 3);
    LrAtomization atoms = Atoms(ch, 7, trial % 3);
    auto forward = ComputePrivacyCurve(atoms, grid, Sidedness::kQOverP);
    auto reverse = ComputePrivacyCurve(atoms, grid, Sidedness::kPOverQ);
    auto both = ComputePrivacyCurve(atoms, grid, Sidedness::kTwoSided);
    auto swapped = ComputePrivacyCurve(atoms.Reversed(), grid);
    ASSERT_TRUE(forward.ok() && reverse.ok() && both.ok() && swapped.ok());
    for (size_t i = 0; i < grid.size(); ++i) {
      EXPECT_NEAR(reverse->points[i].delta, swapped->points[i].delta, 1e-15);
      EXPECT_EQ(both->points[i].delta,
                std::max(forward->points[i].delta, reverse->points[i].delta));
      if (i > 0) {
        EXPECT_LE(forward->points[i].delta, forward->points[i - 1].delta);
        EXPECT_LE(reverse->points[i].delta, reverse->points[i - 1].delta);
      }
      EXPECT_GE(forward->points[i].delta, 0.0);
      EXPECT_LE(forward->points[i].delta, 1.0);
    }
  }
}

TEST(PrivacyCurveTest, RejectsBadGrids) {
  LrAtomization atoms = Atoms(Rr(1.0), 3, 0);
  EXPECT_FALSE(ComputePrivacyCurve(atoms, std::vector<double>{-0.1}).ok());
  EXPECT_FALSE(ComputePrivacyCurve(atoms, std::vector<double>{1.0, 0.5}).ok());
}

TEST(SidednessTest, Parses) {
  EXPECT_EQ(*ParseSidedness("two-sided"), Sidedness::kTwoSided);
  EXPECT_EQ(*ParseSidedness("q-over-p"), Sidedness::kQOverP);
  EXPECT_EQ(*ParseSidedness("p-over-q"), Sidedness::kPOverQ);
  EXPECT_FALSE(ParseSidedness("sideways").ok());
}

TEST(BinomialCurveTest, MatchesEnumeration) {
  std::mt19937_64 rng(31);
  const std::vector<double> grid = LogGrid(1e-3, 10.0, 50);
  std::vector<Channel> channels = {Rr(kLn3), RandomFullChannel(rng, 2),
                                   RandomFullChannel(rng, 2)};
  for (const Channel& ch : channels) {
    for (int n = 1; n <= 20; ++n) {
      auto binomial = BinomialCurve(ch, n, grid);
      auto exact = ComputePrivacyCurve(Atoms(ch, n, 0), grid);
      ASSERT_TRUE(binomial.ok() && exact.ok());
      for (size_t i = 0; i < grid.size(); ++i) {
        EXPECT_NEAR(binomial->points[i].delta, exact->points[i].delta, 1e-12);
      }
    }
  }
}

TEST(BinomialCurveTest, RandomizedResponseSmallN) {
  auto curve = BinomialCurve(Rr(kLn3), 2, std::vector<double>{0.0});
  ASSERT_TRUE(curve.ok());
  EXPECT_NEAR(curve->points[0].delta, 3.0 / 8, 1e-15);
  auto flat = BinomialCurve(Identity2(), 50, std::vector<double>{0.0, 1.0});
  ASSERT_TRUE(flat.ok());
  EXPECT_EQ(flat->points[0].delta, 0.0);
  EXPECT_EQ(flat->points[1].delta, 0.0);
}

TEST(BinomialCurveTest, LargeNMatchesCompensatedSum) {
  Channel ch = Rr(kLn3);
  const int n = 1000;
  const double eps = 0.5;
  const double p0 = ch.w0()[1];
  const double w0 = ch.w1()[0] / ch.w0()[0];
  const double w1 = ch.w1()[1] / ch.w0()[1];
  // Kahan-compensated sum with weights from lgamma.
  double sum = 0.0;
  double carry = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double ratio = ((n - j) * w0 + j * w1) / n;
    const double excess = ratio - std::exp(eps);
    if (excess <= 0.0) continue;
    const double log_w = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) -
                         std::lgamma(n - j + 1.0) + j * std::log(p0) +
                         (n - j) * std::log1p(-p0);
    const double term = std::exp(log_w) * excess - carry;
    const double next = sum + term;
    carry = (next - sum) - term;
    sum = next;
  }
  auto curve = BinomialCurve(ch, n, std::vector<double>{eps});
  ASSERT_TRUE(curve.ok());
  EXPECT_NEAR(curve->points[0].delta, sum, 1e-12);
  EXPECT_FALSE(BinomialCurve(MakeChannel({0.2, 0.3, 0.5}, {0.3, 0.3, 0.4}), 3,
                             std::vector<double>{0.0})
                   .ok());
}

TEST(DivergencesTest, RandomizedResponseSingleUser) {
  LrAtomization atoms = Atoms(Rr(kLn3), 1, 0);
  auto report = ComputeDivergences(atoms, std::vector<double>{2.0});
  ASSERT_TRUE(report.ok());
  const double expected = 0.75 * JsdDefinition(1.0 / 3) + 0.25 * JsdDefinition(3.0);
  EXPECT_NEAR(report->jsd, expected, 1e-14);
  EXPECT_NEAR(report->jsd, 0.130812, 5e-7);
  // chi^2(Q||P) for n = 1 is chi^2(W1||W0).
  EXPECT_NEAR(report->chi2, 4.0 / 3, 1e-14);
  EXPECT_NEAR(report->kl, 0.25 * std::log(1.0 / 3) + 0.75 * kLn3, 1e-14);
  // D_2 = log E_P[L^2] = log(1 + chi^2).
  EXPECT_NEAR(report->renyi[0], std::log(7.0 / 3), 1e-14);
}

TEST(DivergencesTest, TotalVariationAndSymmetry) {
  auto report = ComputeDivergences(Atoms(Rr(kLn3), 2, 0));
  ASSERT_TRUE(report.ok());
  EXPECT_NEAR(report->tv, 3.0 / 8, 1e-15);

  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    LrAtomization atoms = Atoms(RandomFullChannel(rng, 3), 6, trial % 5);
    auto forward = ComputeDivergences(atoms);
    auto backward = ComputeDivergences(atoms.Reversed());
    ASSERT_TRUE(forward.ok() && backward.ok());
    EXPECT_NEAR(forward->jsd, backward->jsd, 1e-10);
    EXPECT_NEAR(forward->tv, backward->tv, 1e-12);
  }
}

TEST(DivergencesTest, IdenticalChannelsAreZero) {
  auto report = ComputeDivergences(Atoms(Identity2(), 5, 0),
                                   std::vector<double>{1.5, 3.0});
  ASSERT_TRUE(report.ok());
  EXPECT_NEAR(report->jsd, 0.0, 1e-15);
  EXPECT_NEAR(report->tv, 0.0, 1e-15);
  EXPECT_NEAR(report->chi2, 0.0, 1e-15);
  EXPECT_NEAR(report->kl, 0.0, 1e-15);
  for (double r : report->renyi) EXPECT_NEAR(r, 0.0, 1e-15);
}

TEST(DivergencesTest, RenyiRejectsSingularAndBadOrders) {
  LrAtomization singular = Atoms(MakeChannel({0.5, 0.5, 0.0}, {0.2, 0.3, 0.5}), 2, 0);
  EXPECT_FALSE(ComputeDivergences(singular, std::vector<double>{2.0}).ok());
  EXPECT_TRUE(ComputeDivergences(singular).ok());
  EXPECT_FALSE(
      ComputeDivergences(Atoms(Rr(1.0), 2, 0), std::vector<double>{1.0}).ok());
}

TEST(JsdPointwiseTest, MatchesDefinition) {
  EXPECT_NEAR(JsdPointwise(0.0), 0.5 * std::log(2.0), 1e-16);
  EXPECT_EQ(JsdPointwise(1.0), 0.0);
  for (double t : {1e-6, 0.1, 0.5, 0.999999, 1.000001, 2.0, 30.0}) {
    EXPECT_NEAR(JsdPointwise(t), JsdDefinition(t), 1e-13) << t;
  }
}

TEST(TradeoffTest, Anchors) {
  TradeoffCurve one = ComputeTradeoffCurve(Atoms(Rr(kLn3), 1, 0));
  EXPECT_NEAR(one.Beta(0.25), 0.25, 1e-15);
  TradeoffCurve two = ComputeTradeoffCurve(Atoms(Rr(kLn3), 2, 0));
  EXPECT_NEAR(two.Beta(1.0 / 16), 13.0 / 16, 1e-15);
  TradeoffCurve blind = ComputeTradeoffCurve(Atoms(Identity2(), 4, 0));
  for (double a : {0.0, 0.3, 0.7, 1.0}) EXPECT_NEAR(blind.Beta(a), 1.0 - a, 1e-15);
}

TEST(TradeoffTest, ConvexNonincreasingAboveTvLine) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 8; ++trial) {
    LrAtomization atoms = Atoms(RandomFullChannel(rng, 3), 6, trial % 4);
    TradeoffCurve curve = ComputeTradeoffCurve(atoms);
    auto div = ComputeDivergences(atoms);
    ASSERT_TRUE(div.ok());
    const auto& v = curve.vertices;
    ASSERT_GE(v.size(), 2u);
    EXPECT_EQ(v.front().alpha, 0.0);
    EXPECT_LE(v.front().beta, 1.0);
    EXPECT_EQ(v.back().alpha, 1.0);
    EXPECT_EQ(v.back().beta, 0.0);
    double last_slope = -INFINITY;
    for (size_t i = 1; i < v.size(); ++i) {
      EXPECT_LE(v[i].beta, v[i - 1].beta + 1e-15);
      const double da = v[i].alpha - v[i - 1].alpha;
      if (da > 1e-12) {
        const double slope = (v[i].beta - v[i - 1].beta) / da;
        EXPECT_GE(slope, last_slope - 1e-9);
        last_slope = slope;
      }
    }
    for (double a = 0.0; a <= 1.0; a += 0.05) {
      EXPECT_GE(curve.Beta(a), 1.0 - a - div->tv - 1e-12);
    }
  }
}

TEST(ConditionalScoreTest, Anchors) {
  Channel ch = Rr(kLn3);
  const std::vector<int> mid = {1, 1};
  const std::vector<int> top = {0, 2};
  auto u_mid = ConditionalScore(ch, Composition{2, 0}, mid);
  auto u_top = ConditionalScore(ch, Composition{2, 0}, top);
  ASSERT_TRUE(u_mid.ok() && u_top.ok());
  EXPECT_NEAR(*u_mid, 2.0 / 3, 1e-14);
  EXPECT_NEAR(*u_top, 2.0, 1e-14);
  const std::vector<int> bad = {3, 0};
  EXPECT_FALSE(ConditionalScore(ch, Composition{2, 0}, bad).ok());
  auto flat = ConditionalScore(Identity2(), Composition{3, 1},
                               std::vector<int>{2, 1});
  ASSERT_TRUE(flat.ok());
  EXPECT_NEAR(*flat, 0.0, 1e-14);
}

TEST(LinearizationResidualTest, IdenticalChannelsAreExact) {
  auto summary = LinearizationResidual(Identity2(), Composition{10, 5}, 1.0);
  ASSERT_TRUE(summary.ok());
  EXPECT_NEAR(summary->max_residual, 0.0, 1e-14);
}

TEST(LinearizationResidualTest, DecaysForRandomizedResponse) {
  auto at8 = LinearizationResidual(Rr(kLn3), Composition{8, 4}, 1.0);
  auto at16 = LinearizationResidual(Rr(kLn3), Composition{16, 8}, 1.0);
  ASSERT_TRUE(at8.ok() && at16.ok());
  EXPECT_GT(at8->histograms_in_window, 0u);
  EXPECT_LT(at16->max_residual, at8->max_residual);
  EXPECT_NEAR(at8->pi_used, 4.0 / 7, 1e-15);
  auto k_over_n = LinearizationResidual(Rr(kLn3), Composition{8, 4}, 1.0,
                                        ProportionConvention::kKOverN);
  ASSERT_TRUE(k_over_n.ok());
  EXPECT_NEAR(k_over_n->pi_used, 0.5, 1e-15);
}

TEST(LinearizationResidualTest, WideWindowHoldsAlmostAllMass) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 3; ++trial) {
    Channel ch = RandomFullChannel(rng, 3);
    for (int n : {20, 30}) {
      auto summary = LinearizationResidual(ch, Composition{n, n / 2}, 3.0);
      ASSERT_TRUE(summary.ok());
      EXPECT_LE(summary->outside_mass, 0.05);
    }
  }
}

}  // namespace
}  // namespace shuffle_dp
