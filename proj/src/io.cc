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

#include "shuffle_dp/io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/string_view.h"
#include "shuffle_dp/status_macros.h"

namespace shuffle_dp {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  for (absl::string_view piece :
       absl::StrSplit(absl::string_view(s.data(), s.size()), sep)) {
    out.emplace_back(piece.data(), piece.size());
  }
  return out;
}

std::string EscapeXml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string FormatDouble(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return "0";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, result.ptr);
}

absl::StatusOr<double> ParseDouble(std::string_view token) {
  token = Trim(token);
  if (token == "inf") return std::numeric_limits<double>::infinity();
  if (token == "-inf") return -std::numeric_limits<double>::infinity();
  if (token == "nan") return std::numeric_limits<double>::quiet_NaN();
  double value = 0.0;
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  if (!token.empty() && *begin == '+') ++begin;
  const auto result = std::from_chars(begin, end, value);
  if (token.empty() || result.ec != std::errc() || result.ptr != end) {
    return absl::InvalidArgumentError(
        absl::StrCat("not a number: '", std::string(token), "'"));
  }
  return value;
}

absl::StatusOr<std::vector<double>> ParseEpsGrid(std::string_view text) {
  text = Trim(text);
  std::vector<double> grid;
  if (text.substr(0, 4) == "log:") {
    const std::vector<std::string_view> parts = Split(text.substr(4), ':');
    if (parts.size() != 3) {
      return absl::InvalidArgumentError(
          "log grid must look like log:lo:hi:count");
    }
    SHUFFLE_DP_ASSIGN_OR_RETURN(double lo, ParseDouble(parts[0]));
    SHUFFLE_DP_ASSIGN_OR_RETURN(double hi, ParseDouble(parts[1]));
    int count = 0;
    const std::string_view c = Trim(parts[2]);
    const auto res = std::from_chars(c.data(), c.data() + c.size(), count);
    if (res.ec != std::errc() || res.ptr != c.data() + c.size()) {
      return absl::InvalidArgumentError("log grid count must be an integer");
    }
    if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi) || count < 2) {
      return absl::InvalidArgumentError(
          "log grid needs 0 < lo < hi (finite) and count >= 2");
    }
    grid.resize(count);
    const double step = std::log(hi / lo) / (count - 1);
    for (int i = 0; i < count; ++i) grid[i] = lo * std::exp(step * i);
    grid.front() = lo;
    grid.back() = hi;
  } else {
    for (std::string_view token : Split(text, ',')) {
      SHUFFLE_DP_ASSIGN_OR_RETURN(double eps, ParseDouble(token));
      grid.push_back(eps);
    }
  }
  for (size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0) || !std::isfinite(grid[i])) {
      return absl::InvalidArgumentError(absl::StrCat(
          "epsilon values must be finite and >= 0, got ", grid[i]));
    }
    if (i > 0 && grid[i] < grid[i - 1]) {
      return absl::InvalidArgumentError("epsilon grid must be ascending");
    }
  }
  return grid;
}

std::string ChannelFingerprint(const Channel& ch) {
  uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : ChannelToJson(ch)) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  static constexpr char kHex[] = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = kHex[hash & 0xf];
    hash >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

std::string ManifestHeader(const RunManifest& manifest) {
  std::string out = absl::StrCat("# command: ", manifest.command, "\n");
  for (const auto& [key, value] : manifest.parameters) {
    absl::StrAppend(&out, "# ", key, ": ", value, "\n");
  }
  if (!manifest.channel_fingerprint.empty()) {
    absl::StrAppend(&out, "# channel_fingerprint: ",
                    manifest.channel_fingerprint, "\n");
  }
  absl::StrAppend(&out, "# version: ", manifest.version, "\n");
  if (!manifest.timestamp.empty()) {
    absl::StrAppend(&out, "# timestamp: ", manifest.timestamp, "\n");
  }
  return out;
}

std::string CurveCsv(const PrivacyCurve& curve) {
  std::string out = "epsilon,delta\n";
  for (const CurvePoint& pt : curve.points) {
    absl::StrAppend(&out, FormatDouble(pt.epsilon), ",", FormatDouble(pt.delta),
                    "\n");
  }
  return out;
}

std::string TradeoffCsv(const TradeoffCurve& curve) {
  std::string out = "alpha,beta\n";
  for (const TradeoffVertex& v : curve.vertices) {
    absl::StrAppend(&out, FormatDouble(v.alpha), ",", FormatDouble(v.beta),
                    "\n");
  }
  return out;
}

std::string HistogramLawCsv(const HistogramLaw& law) {
  std::string out;
  for (int y = 0; y < law.d(); ++y) absl::StrAppend(&out, "h_", y, ",");
  out += "prob\n";
  for (size_t i = 0; i < law.size(); ++i) {
    for (int c : law.histogram(i)) absl::StrAppend(&out, c, ",");
    absl::StrAppend(&out, FormatDouble(law.prob(i)), "\n");
  }
  return out;
}

std::string SamplesCsv(std::span<const double> samples) {
  std::string out = "lambda\n";
  for (double x : samples) absl::StrAppend(&out, FormatDouble(x), "\n");
  return out;
}

absl::StatusOr<std::vector<CurvePoint>> ParseCurveCsv(std::string_view text) {
  std::vector<CurvePoint> points;
  bool header_seen = false;
  for (std::string_view line : Split(text, '\n')) {
    line = Trim(line);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      if (line != "epsilon,delta") {
        return absl::InvalidArgumentError(
            absl::StrCat("expected header epsilon,delta, got '",
                         std::string(line), "'"));
      }
      header_seen = true;
      continue;
    }
    const std::vector<std::string_view> cells = Split(line, ',');
    if (cells.size() != 2) {
      return absl::InvalidArgumentError(
          absl::StrCat("expected 2 cells, got '", std::string(line), "'"));
    }
    SHUFFLE_DP_ASSIGN_OR_RETURN(double eps, ParseDouble(cells[0]));
    SHUFFLE_DP_ASSIGN_OR_RETURN(double delta, ParseDouble(cells[1]));
    points.push_back({eps, delta});
  }
  if (!header_seen) return absl::InvalidArgumentError("missing CSV header");
  return points;
}

std::string RenderLineChartSvg(std::span<const SvgSeries> series,
                               const SvgOptions& options) {
  const double left = 70.0;
  const double right = 20.0;
  const double top = 40.0;
  const double bottom = 50.0;
  const double plot_w = options.width - left - right;
  const double plot_h = options.height - top - bottom;

  auto y_value = [&](double y) { return options.log_y ? std::log10(y) : y; };
  auto usable = [&](double x, double y) {
    return std::isfinite(x) && std::isfinite(y) && (!options.log_y || y > 0.0);
  };
  double x_lo = INFINITY, x_hi = -INFINITY, y_lo = INFINITY, y_hi = -INFINITY;
  for (const SvgSeries& s : series) {
    for (size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      x_lo = std::min(x_lo, s.x[i]);
      x_hi = std::max(x_hi, s.x[i]);
      y_lo = std::min(y_lo, y_value(s.y[i]));
      y_hi = std::max(y_hi, y_value(s.y[i]));
    }
  }
  if (!(x_lo <= x_hi)) {
    x_lo = 0.0;
    x_hi = 1.0;
    y_lo = 0.0;
    y_hi = 1.0;
  }
  if (x_hi == x_lo) x_hi = x_lo + 1.0;
  if (y_hi == y_lo) y_hi = y_lo + 1.0;
  auto px = [&](double x) { return left + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) {
    return top + (1.0 - (y_value(y) - y_lo) / (y_hi - y_lo)) * plot_h;
  };

  std::string out = absl::StrCat(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"", options.width,
      "\" height=\"", options.height, "\" font-family=\"sans-serif\" "
      "font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
  absl::StrAppend(&out, "<text x=\"", options.width / 2,
                  "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">",
                  EscapeXml(options.title), "</text>\n");
  absl::StrAppend(&out, "<rect x=\"", left, "\" y=\"", top, "\" width=\"",
                  plot_w, "\" height=\"", plot_h,
                  "\" fill=\"none\" stroke=\"black\"/>\n");
  for (int t = 0; t <= 4; ++t) {
    const double fx = x_lo + (x_hi - x_lo) * t / 4.0;
    const double fy = y_lo + (y_hi - y_lo) * t / 4.0;
    const double label_y = options.log_y ? std::pow(10.0, fy) : fy;
    absl::StrAppend(&out, "<text x=\"", px(fx), "\" y=\"", top + plot_h + 16,
                    "\" text-anchor=\"middle\">", FormatDouble(fx), "</text>\n");
    absl::StrAppend(&out, "<text x=\"", left - 6, "\" y=\"",
                    top + (1.0 - t / 4.0) * plot_h + 4,
                    "\" text-anchor=\"end\">", FormatDouble(label_y),
                    "</text>\n");
  }
  absl::StrAppend(&out, "<text x=\"", left + plot_w / 2, "\" y=\"",
                  options.height - 12, "\" text-anchor=\"middle\">",
                  EscapeXml(options.x_label), "</text>\n");
  absl::StrAppend(&out, "<text x=\"16\" y=\"", top + plot_h / 2,
                  "\" text-anchor=\"middle\" transform=\"rotate(-90 16 ",
                  top + plot_h / 2, ")\">", EscapeXml(options.y_label),
                  options.log_y ? " (log)" : "", "</text>\n");
  for (size_t k = 0; k < series.size(); ++k) {
    const SvgSeries& s = series[k];
    const char* color = kPalette[k % std::size(kPalette)];
    std::string points;
    for (size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      absl::StrAppend(&points, points.empty() ? "" : " ", px(s.x[i]), ",",
                      py(s.y[i]));
    }
    absl::StrAppend(&out, "<polyline fill=\"none\" stroke=\"", color,
                    "\" stroke-width=\"1.5\" points=\"", points, "\"/>\n");
    absl::StrAppend(&out, "<text x=\"", left + plot_w - 8, "\" y=\"",
                    top + 16 + 14 * k, "\" text-anchor=\"end\" fill=\"", color,
                    "\">", EscapeXml(s.label), "</text>\n");
  }
  out += "</svg>\n";
  return out;
}

}  // namespace shuffle_dp
