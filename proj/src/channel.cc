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

#include "shuffle_dp/channel.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <limits>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace shuffle_dp {
namespace {

absl::Status CheckRow(std::span<const double> row, std::string_view name) {
  double sum = 0.0;
  for (size_t y = 0; y < row.size(); ++y) {
    if (!std::isfinite(row[y])) {
      return absl::InvalidArgumentError(
          absl::StrCat(std::string(name), "[", y, "] is not finite"));
    }
    if (row[y] < 0.0) {
      return absl::InvalidArgumentError(
          absl::StrCat(std::string(name), "[", y, "] = ", row[y], " is negative"));
    }
    sum += row[y];
  }
  if (std::abs(sum - 1.0) > kProbabilitySumTolerance) {
    return absl::InvalidArgumentError(
        absl::StrCat(std::string(name), " sums to ", sum, ", expected 1"));
  }
  return absl::OkStatus();
}

std::vector<double> Normalized(std::span<const double> row) {
  double sum = 0.0;
  for (double p : row) sum += p;
  std::vector<double> out(row.begin(), row.end());
  if (sum != 1.0) {
    for (double& p : out) p /= sum;
  }
  return out;
}

}  // namespace

std::string_view SupportClassName(SupportClass support) {
  switch (support) {
    case SupportClass::kFull:
      return "FULL";
    case SupportClass::kNullSupport:
      return "NULL_SUPPORT";
    case SupportClass::kSingular:
      return "SINGULAR";
  }
  return "UNKNOWN";
}

Channel::Channel(std::vector<double> w0, std::vector<double> w1)
    : w0_(std::move(w0)), w1_(std::move(w1)) {
  delta_star_ = *std::min_element(w0_.begin(), w0_.end());
  delta_full_ =
      std::min(delta_star_, *std::min_element(w1_.begin(), w1_.end()));
  if (delta_star_ == 0.0) {
    support_ = SupportClass::kSingular;
  } else if (delta_full_ == 0.0) {
    support_ = SupportClass::kNullSupport;
  } else {
    support_ = SupportClass::kFull;
  }
  for (int y = 0; y < d(); ++y) {
    const bool tiny0 = w0_[y] > 0.0 && w0_[y] < kNearZeroMass;
    const bool tiny1 = w1_[y] > 0.0 && w1_[y] < kNearZeroMass;
    if (tiny0 || tiny1) near_zero_symbols_.push_back(y);
  }
}

absl::StatusOr<Channel> Channel::Create(std::span<const double> w0,
                                        std::span<const double> w1) {
  if (w0.size() != w1.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "W0 has length ", w0.size(), " but W1 has length ", w1.size()));
  }
  if (w0.size() < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("alphabet size must be at least 2, got ", w0.size()));
  }
  if (auto s = CheckRow(w0, "W0"); !s.ok()) return s;
  if (auto s = CheckRow(w1, "W1"); !s.ok()) return s;
  return Channel(Normalized(w0), Normalized(w1));
}

bool Channel::IsIdentity() const { return w0_ == w1_; }

absl::StatusOr<Channel> ValidateChannel(std::span<const double> w0,
                                        std::span<const double> w1) {
  return Channel::Create(w0, w1);
}

absl::StatusOr<Channel> RandomizedResponseChannel(double eps0) {
  if (!std::isfinite(eps0) || eps0 < 0.0) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps0 must be finite and nonnegative, got ", eps0));
  }
  const double q = 1.0 / (1.0 + std::exp(eps0));
  const std::vector<double> w0 = {1.0 - q, q};
  const std::vector<double> w1 = {q, 1.0 - q};
  return Channel::Create(w0, w1);
}

absl::StatusOr<double> RandomizedResponseEpsilon(const Channel& ch) {
  if (ch.d() != 2) return absl::NotFoundError("not a binary channel");
  const auto& w0 = ch.w0();
  const auto& w1 = ch.w1();
  const double q = w0[1];
  const double tol = 1e-12;
  if (q <= 0.0 || q > 0.5 + tol || std::abs(w1[0] - q) > tol ||
      std::abs(w1[1] - w0[0]) > tol) {
    return absl::NotFoundError("not a randomized-response channel");
  }
  return std::max(0.0, std::log((1.0 - q) / q));
}

absl::StatusOr<ScoreStats> ComputeScoreStats(const Channel& ch) {
  if (ch.support() == SupportClass::kSingular) {
    return absl::InvalidArgumentError(
        "score statistics need W0(y) > 0 for every symbol");
  }
  const int d = ch.d();
  ScoreStats s;
  s.w.resize(d);
  s.r.resize(d);
  s.v.resize(d);
  s.delta_star = ch.delta_star();
  s.delta_full = ch.delta_full();
  s.w_max = -std::numeric_limits<double>::infinity();
  s.w_min = std::numeric_limits<double>::infinity();
  for (int y = 0; y < d; ++y) {
    const double w0 = ch.w0()[y];
    const double w1 = ch.w1()[y];
    s.v[y] = w1 - w0;
    s.w[y] = w1 / w0;
    s.r[y] = s.v[y] / w0;
    s.chi2 += s.v[y] * s.v[y] / w0;
    s.mu3 += w0 * s.r[y] * s.r[y] * s.r[y];
    s.w_max = std::max(s.w_max, s.w[y]);
    s.w_min = std::min(s.w_min, s.w[y]);
  }
  return s;
}

absl::StatusOr<Channel> ChannelFromJson(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("channel JSON does not parse: ", e.what()));
  }
  if (!doc.is_object() || !doc.contains("d") || !doc.contains("W0") ||
      !doc.contains("W1")) {
    return absl::InvalidArgumentError(
        "channel JSON must be an object with fields d, W0, W1");
  }
  if (!doc["d"].is_number_integer() || !doc["W0"].is_array() ||
      !doc["W1"].is_array()) {
    return absl::InvalidArgumentError(
        "channel JSON: d must be an integer, W0 and W1 arrays");
  }
  std::vector<double> w0;
  std::vector<double> w1;
  for (const auto& x : doc["W0"]) {
    if (!x.is_number()) {
      return absl::InvalidArgumentError("channel JSON: W0 entry not numeric");
    }
    w0.push_back(x.get<double>());
  }
  for (const auto& x : doc["W1"]) {
    if (!x.is_number()) {
      return absl::InvalidArgumentError("channel JSON: W1 entry not numeric");
    }
    w1.push_back(x.get<double>());
  }
  const auto d = doc["d"].get<long long>();
  if (d != static_cast<long long>(w0.size()) ||
      d != static_cast<long long>(w1.size())) {
    return absl::InvalidArgumentError(absl::StrCat(
        "channel JSON: d = ", d, " does not match vector lengths ", w0.size(),
        " and ", w1.size()));
  }
  return Channel::Create(w0, w1);
}

std::string ChannelToJson(const Channel& ch) {
  nlohmann::json doc;
  doc["d"] = ch.d();
  doc["W0"] = ch.w0();
  doc["W1"] = ch.w1();
  return doc.dump();
}

}  // namespace shuffle_dp
