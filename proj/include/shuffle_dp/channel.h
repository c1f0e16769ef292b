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

// Finite-output local randomizers. A channel is the pair of output
// distributions (W0, W1) a user emits for private bit 0 and 1 over the
// alphabet {0, ..., d-1}.

#ifndef SHUFFLE_DP_CHANNEL_H_
#define SHUFFLE_DP_CHANNEL_H_

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace shuffle_dp {

// Tolerance on |sum - 1| for accepted probability vectors.
inline constexpr double kProbabilitySumTolerance = 1e-9;
// Entries strictly between 0 and this value are legal but reported.
inline constexpr double kNearZeroMass = 1e-12;

enum class SupportClass {
  // Every symbol has positive mass under both W0 and W1.
  kFull,
  // W0 > 0 everywhere but some W1(y) = 0; Q << P still holds.
  kNullSupport,
  // Some W0(y) = 0; likelihood ratios W1/W0 are undefined there.
  kSingular,
};

std::string_view SupportClassName(SupportClass support);

class Channel {
 public:
  // Validates and renormalizes. Fails on length mismatch, d < 2, non-finite
  // or negative entries, or a sum more than kProbabilitySumTolerance from 1.
  static absl::StatusOr<Channel> Create(std::span<const double> w0,
                                        std::span<const double> w1);

  int d() const { return static_cast<int>(w0_.size()); }
  const std::vector<double>& w0() const { return w0_; }
  const std::vector<double>& w1() const { return w1_; }
  SupportClass support() const { return support_; }
  // min_y W0(y).
  double delta_star() const { return delta_star_; }
  // min over both rows and all symbols.
  double delta_full() const { return delta_full_; }
  // Symbols with an entry in (0, kNearZeroMass) in either row.
  const std::vector<int>& near_zero_symbols() const {
    return near_zero_symbols_;
  }
  // True when W0 == W1 exactly (v = 0).
  bool IsIdentity() const;

 private:
  Channel(std::vector<double> w0, std::vector<double> w1);

  std::vector<double> w0_;
  std::vector<double> w1_;
  SupportClass support_ = SupportClass::kFull;
  double delta_star_ = 0.0;
  double delta_full_ = 0.0;
  std::vector<int> near_zero_symbols_;
};

absl::StatusOr<Channel> ValidateChannel(std::span<const double> w0,
                                        std::span<const double> w1);

// Binary randomized response with local parameter eps0: W0 = (1-q, q),
// W1 = (q, 1-q), q = 1 / (1 + e^eps0).
absl::StatusOr<Channel> RandomizedResponseChannel(double eps0);

// If `ch` is a binary randomized-response channel (W1 is W0 reversed and
// W0(1) <= 1/2), returns its eps0; otherwise NotFound.
absl::StatusOr<double> RandomizedResponseEpsilon(const Channel& ch);

// Per-symbol score statistics under W0.
struct ScoreStats {
  std::vector<double> w;  // W1(y) / W0(y)
  std::vector<double> r;  // w - 1
  std::vector<double> v;  // W1 - W0
  double chi2 = 0.0;      // chi^2(W1 || W0) = E_W0[r^2]
  double mu3 = 0.0;       // E_W0[r^3]
  double delta_star = 0.0;
  double delta_full = 0.0;
  double w_max = 0.0;
  double w_min = 0.0;
};

// Requires delta_star > 0.
absl::StatusOr<ScoreStats> ComputeScoreStats(const Channel& ch);

// JSON schema {"d": int, "W0": [...], "W1": [...]}.
absl::StatusOr<Channel> ChannelFromJson(std::string_view json_text);
std::string ChannelToJson(const Channel& ch);

}  // namespace shuffle_dp

#endif  // SHUFFLE_DP_CHANNEL_H_
