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

// Text serialization: locale-independent number formatting, CSV tables with
// '#' manifest headers, epsilon-grid specs and a small SVG line chart.

#ifndef SHUFFLE_DP_IO_H_
#define SHUFFLE_DP_IO_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "shuffle_dp/channel.h"
#include "shuffle_dp/exact_dist.h"

namespace shuffle_dp {

inline constexpr char kToolVersion[] = "0.1.0";
inline constexpr char kDefaultEpsGrid[] = "log:1e-3:10:64";

// Shortest decimal string that parses back to exactly `x` (at most 17
// significant digits). "inf", "-inf" and "nan" for non-finite values.
std::string FormatDouble(double x);

// Strict parse of the whole token; no locale, no trailing garbage.
absl::StatusOr<double> ParseDouble(std::string_view token);

// Either a comma-separated list ("0,0.5,1") or "log:lo:hi:count" with
// 0 < lo < hi and count >= 2. The result must be ascending and >= 0.
absl::StatusOr<std::vector<double>> ParseEpsGrid(std::string_view text);

struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::string channel_fingerprint;
  std::string version = kToolVersion;
  // Omitted from the output when empty so that reruns are byte-identical.
  std::string timestamp;
};

// 64-bit FNV-1a of the canonical channel JSON, as 16 hex digits.
std::string ChannelFingerprint(const Channel& ch);

// '#'-prefixed header block, one "key: value" per line.
std::string ManifestHeader(const RunManifest& manifest);

std::string CurveCsv(const PrivacyCurve& curve);
std::string TradeoffCsv(const TradeoffCurve& curve);
std::string HistogramLawCsv(const HistogramLaw& law);
std::string SamplesCsv(std::span<const double> samples);

// Reads an "epsilon,delta" table back, skipping '#' lines.
absl::StatusOr<std::vector<CurvePoint>> ParseCurveCsv(std::string_view text);

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct SvgOptions {
  std::string title;
  std::string x_label = "epsilon";
  std::string y_label = "delta";
  bool log_y = false;
  int width = 640;
  int height = 420;
};

// Minimal static line chart. Points with non-finite coordinates, and
// nonpositive y on a log axis, are dropped.
std::string RenderLineChartSvg(std::span<const SvgSeries> series,
                               const SvgOptions& options);

}  // namespace shuffle_dp

#endif  // SHUFFLE_DP_IO_H_
