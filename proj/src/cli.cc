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

#include "shuffle_dp/cli.h"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "shuffle_dp/asymptotics.h"
#include "shuffle_dp/bounds.h"
#include "shuffle_dp/channel.h"
#include "shuffle_dp/exact_dist.h"
#include "shuffle_dp/io.h"
#include "shuffle_dp/montecarlo.h"
#include "shuffle_dp/multimessage.h"
#include "shuffle_dp/simplex_linalg.h"
#include "shuffle_dp/status_macros.h"

namespace shuffle_dp {
namespace {

using Json = nlohmann::ordered_json;

struct CommonOptions {
  std::string channel_path;
  int n = 0;
  int k = 0;
  double atom_cap = kDefaultAtomCap;
  std::string output;
  bool stamp = false;
};

struct CurveOptions {
  CommonOptions common;
  std::string eps = kDefaultEpsGrid;
  std::string sidedness = "q-over-p";
  std::string engine = "exact";
  std::string format = "csv";
  std::string svg;
  bool svg_log_y = false;
};

struct ReportOptions {
  CommonOptions common;
  std::optional<double> pi;
  int m = 1;
  std::string format = "text";
};

struct SimulateOptions {
  CommonOptions common;
  std::string hypothesis = "P";
  uint64_t seed = 0;
  int64_t reps = 1000;
  int workers = 1;
  double gamma = 0.05;
};

std::string UtcTimestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

absl::StatusOr<Channel> LoadChannel(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot open channel file '", path, "'"));
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  absl::StatusOr<Channel> ch = ChannelFromJson(buffer.str());
  if (!ch.ok()) {
    return absl::Status(ch.status().code(),
                        absl::StrCat(path, ": ", ch.status().message()));
  }
  return ch;
}

absl::Status Emit(const std::string& path, const std::string& text,
                  std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return absl::OkStatus();
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    return absl::InvalidArgumentError(
        absl::StrCat("cannot write output file '", path, "'"));
  }
  file << text;
  return file ? absl::OkStatus()
              : absl::InternalError(absl::StrCat("write failed: ", path));
}

RunManifest BaseManifest(std::string command, const CommonOptions& common,
                         const Channel& ch) {
  RunManifest manifest;
  manifest.command = std::move(command);
  manifest.channel_fingerprint = ChannelFingerprint(ch);
  if (common.stamp) manifest.timestamp = UtcTimestamp();
  manifest.parameters.emplace_back("n", absl::StrCat(common.n));
  manifest.parameters.emplace_back("k", absl::StrCat(common.k));
  return manifest;
}

Json ManifestJson(const RunManifest& manifest) {
  Json j;
  j["command"] = manifest.command;
  for (const auto& [key, value] : manifest.parameters) j[key] = value;
  j["channel_fingerprint"] = manifest.channel_fingerprint;
  j["version"] = manifest.version;
  if (!manifest.timestamp.empty()) j["timestamp"] = manifest.timestamp;
  return j;
}

absl::Status CheckCanonicalOneSided(const CurveOptions& o, Sidedness s) {
  if (o.common.k != 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "engine ", o.engine, " covers the canonical pair only (k = 0)"));
  }
  if (s != Sidedness::kQOverP) {
    return absl::InvalidArgumentError(absl::StrCat(
        "engine ", o.engine, " gives the q-over-p curve only"));
  }
  return absl::OkStatus();
}

absl::Status RunCurve(const CurveOptions& o, std::ostream& out) {
  SHUFFLE_DP_ASSIGN_OR_RETURN(Channel ch, LoadChannel(o.common.channel_path));
  SHUFFLE_DP_ASSIGN_OR_RETURN(std::vector<double> grid, ParseEpsGrid(o.eps));
  SHUFFLE_DP_ASSIGN_OR_RETURN(Sidedness sidedness, ParseSidedness(o.sidedness));
  SHUFFLE_DP_ASSIGN_OR_RETURN(Composition comp,
                              Composition::Create(o.common.n, o.common.k));
  if (o.format != "csv" && o.format != "json") {
    return absl::InvalidArgumentError("--format must be csv or json");
  }
  RunManifest manifest = BaseManifest("curve", o.common, ch);
  manifest.parameters.emplace_back("engine", o.engine);
  manifest.parameters.emplace_back("sidedness", std::string(SidednessName(sidedness)));
  manifest.parameters.emplace_back("eps", o.eps);

  PrivacyCurve curve;
  curve.sidedness = sidedness;
  if (o.engine == "exact") {
    SHUFFLE_DP_ASSIGN_OR_RETURN(LrAtomization atoms,
                                ComputeLrAtoms(ch, comp, o.common.atom_cap));
    SHUFFLE_DP_ASSIGN_OR_RETURN(curve,
                                ComputePrivacyCurve(atoms, grid, sidedness));
  } else if (o.engine == "binomial") {
    SHUFFLE_DP_RETURN_IF_ERROR(CheckCanonicalOneSided(o, sidedness));
    SHUFFLE_DP_ASSIGN_OR_RETURN(curve, BinomialCurve(ch, comp.n, grid));
  } else if (o.engine == "gdp") {
    SHUFFLE_DP_ASSIGN_OR_RETURN(GdpParams gdp, GdpMu(ch, comp.n, comp.pi(), 1));
    manifest.parameters.emplace_back("mu", FormatDouble(gdp.mu));
    manifest.parameters.emplace_back("source",
                                     std::string(GdpSourceName(gdp.source)));
    for (double eps : grid) {
      SHUFFLE_DP_ASSIGN_OR_RETURN(double delta, GdpDelta(eps, gdp.mu));
      curve.points.push_back({eps, delta});
    }
  } else if (o.engine == "chernoff") {
    SHUFFLE_DP_RETURN_IF_ERROR(CheckCanonicalOneSided(o, sidedness));
    for (double eps : grid) {
      SHUFFLE_DP_ASSIGN_OR_RETURN(ChernoffEvaluation eval,
                                  ChernoffDelta(ch, comp.n, eps));
      curve.points.push_back({eps, eval.bound});
    }
  } else {
    return absl::InvalidArgumentError(absl::StrCat(
        "unknown engine '", o.engine, "' (exact, binomial, gdp, chernoff)"));
  }

  std::string text;
  if (o.format == "json") {
    Json j;
    j["manifest"] = ManifestJson(manifest);
    j["points"] = Json::array();
    for (const CurvePoint& pt : curve.points) {
      j["points"].push_back({{"epsilon", pt.epsilon}, {"delta", pt.delta}});
    }
    text = j.dump(2) + "\n";
  } else {
    text = ManifestHeader(manifest) + CurveCsv(curve);
  }
  SHUFFLE_DP_RETURN_IF_ERROR(Emit(o.common.output, text, out));

  if (!o.svg.empty()) {
    SvgSeries series;
    series.label = o.engine;
    for (const CurvePoint& pt : curve.points) {
      series.x.push_back(pt.epsilon);
      series.y.push_back(pt.delta);
    }
    SvgOptions svg;
    svg.title = absl::StrCat(o.engine, " curve, n = ", comp.n, ", k = ", comp.k);
    svg.log_y = o.svg_log_y;
    std::ofstream file(o.svg, std::ios::binary);
    if (!file) {
      return absl::InvalidArgumentError(
          absl::StrCat("cannot write SVG file '", o.svg, "'"));
    }
    file << RenderLineChartSvg(std::span<const SvgSeries>(&series, 1), svg);
  }
  return absl::OkStatus();
}

// Ordered key/value report with free-text notes.
struct Report {
  std::vector<std::pair<std::string, Json>> entries;
  std::vector<std::string> notes;

  void Add(std::string key, double value) {
    entries.emplace_back(std::move(key), value);
  }
  void Add(std::string key, int value) {
    entries.emplace_back(std::move(key), value);
  }
  void Add(std::string key, std::string value) {
    entries.emplace_back(std::move(key), std::move(value));
  }
};

std::string RenderText(const Report& report) {
  std::string out;
  for (const auto& [key, value] : report.entries) {
    std::string rendered;
    if (value.is_number_float()) {
      rendered = FormatDouble(value.get<double>());
    } else if (value.is_string()) {
      rendered = value.get<std::string>();
    } else {
      rendered = value.dump();
    }
    absl::StrAppend(&out, key, "=", rendered, "\n");
  }
  for (const std::string& note : report.notes) absl::StrAppend(&out, note, "\n");
  return out;
}

absl::Status RunReport(const ReportOptions& o, std::ostream& out) {
  SHUFFLE_DP_ASSIGN_OR_RETURN(Channel ch, LoadChannel(o.common.channel_path));
  SHUFFLE_DP_ASSIGN_OR_RETURN(Composition comp,
                              Composition::Create(o.common.n, o.common.k));
  if (o.m < 1) return absl::InvalidArgumentError("--m must be >= 1");
  if (o.format != "text" && o.format != "json") {
    return absl::InvalidArgumentError("--format must be text or json");
  }
  const double pi = o.pi.has_value() ? *o.pi : comp.pi();
  if (!(pi >= 0.0 && pi <= 1.0)) {
    return absl::InvalidArgumentError("--pi must lie in [0, 1]");
  }
  const int n = comp.n;

  Report r;
  r.Add("d", ch.d());
  r.Add("support", std::string(SupportClassName(ch.support())));
  r.Add("delta_star", ch.delta_star());
  r.Add("delta_full", ch.delta_full());
  if (!ch.near_zero_symbols().empty()) {
    r.notes.push_back(absl::StrCat("warning: ", ch.near_zero_symbols().size(),
                                   " symbol(s) with mass below 1e-12"));
  }
  r.Add("n", n);
  r.Add("k", comp.k);
  r.Add("pi", pi);
  r.Add("m", o.m);
  if (ch.IsIdentity()) r.notes.push_back("perfect privacy: v = 0");

  if (ch.support() == SupportClass::kSingular) {
    r.notes.push_back(
        "SINGULAR channel: score statistics and asymptotic constants are "
        "undefined");
  } else {
    SHUFFLE_DP_ASSIGN_OR_RETURN(ScoreStats stats, ComputeScoreStats(ch));
    r.Add("chi2", stats.chi2);
    r.Add("mu3", stats.mu3);
    r.Add("w_max", stats.w_max);

    SHUFFLE_DP_ASSIGN_OR_RETURN(ExpansionReport jsd,
                                JsdCanonicalAsymptotic(ch, n, true));
    r.Add("jsd_canonical_asymptotic", jsd.asymptotic);
    r.Add("jsd_canonical_term1", jsd.terms[0]);
    r.Add("jsd_canonical_term2", jsd.terms[1]);
    r.Add("jsd_canonical_term3", jsd.terms[2]);
    if (jsd.exact.has_value()) {
      r.Add("jsd_canonical_exact", *jsd.exact);
      r.Add("jsd_canonical_residual", *jsd.residual);
    } else {
      r.notes.push_back("jsd_canonical_exact skipped: enumeration cap");
    }
  }

  if (ch.support() == SupportClass::kFull) {
    SHUFFLE_DP_ASSIGN_OR_RETURN(FisherReport fisher, FisherConstant(ch, pi));
    r.Add("I_pi", fisher.I_pi);
    r.Add("I_f", fisher.I_f);
    absl::StatusOr<double> oracle = FisherViaMixture(ch, pi);
    if (oracle.ok()) r.Add("I_pi_via_mixture", *oracle);
    r.Add("reduced_condition_number", fisher.condition_number);

    SHUFFLE_DP_ASSIGN_OR_RETURN(GdpParams canonical, GdpMu(ch, n, 0.0, 1));
    SHUFFLE_DP_ASSIGN_OR_RETURN(GdpParams proportional, GdpMu(ch, n, pi, 1));
    SHUFFLE_DP_ASSIGN_OR_RETURN(GdpParams unbundled, GdpMu(ch, n, pi, o.m));
    r.Add("mu_canonical", canonical.mu);
    r.Add("mu_prop", proportional.mu);
    r.Add("mu_unb", unbundled.mu);

    SHUFFLE_DP_ASSIGN_OR_RETURN(
        double lead, LeadingDivergence(ch, n, pi, {DivergenceKind::kJsd, 0.0}));
    r.Add("jsd_leading", lead);
    if (comp.k > 0 && comp.k <= n - 1) {
      absl::StatusOr<LrAtomization> atoms =
          ComputeLrAtoms(ch, comp, o.common.atom_cap);
      if (atoms.ok()) {
        SHUFFLE_DP_ASSIGN_OR_RETURN(DivergenceReport div,
                                    ComputeDivergences(*atoms));
        r.Add("jsd_exact_k", div.jsd);
        if (lead > 0.0) r.Add("jsd_exact_over_leading", div.jsd / lead);
      } else if (absl::IsResourceExhausted(atoms.status())) {
        r.notes.push_back("jsd_exact_k skipped: enumeration cap");
      } else {
        return atoms.status();
      }
    }

    SHUFFLE_DP_ASSIGN_OR_RETURN(MmComparison cmp, MmGdpCompare(ch, o.m));
    r.Add("mu_unb_sq_times_n", cmp.mu_unb_sq_times_n);
    r.Add("mu_bund_sq_times_n", cmp.mu_bund_sq_times_n);
    r.Add("ratio", cmp.ratio);
    r.Add("ratio_lower_bound", cmp.ratio_lower_bound);
  } else {
    r.notes.push_back(absl::StrCat(
        std::string(SupportClassName(ch.support())),
        " channel: Fisher, GDP and multi-message sections need FULL support"));
  }

  absl::StatusOr<double> rr_eps = RandomizedResponseEpsilon(ch);
  if (rr_eps.ok()) {
    SHUFFLE_DP_ASSIGN_OR_RETURN(RrBoundary b, ComputeRrBoundary(*rr_eps, n));
    r.Add("rr_eps0", b.eps0);
    r.Add("rr_q_n", b.q_n);
    r.Add("rr_a_n", b.a_n);
    r.Add("rr_x_plus", b.x_plus);
    r.Add("rr_x_minus", b.x_minus);
    r.Add("rr_sigma2", b.sigma2);
    r.Add("rr_rho3", b.rho3);
    r.Add("rr_lyapunov_ratio", b.lyapunov_ratio);
    r.Add("rr_lyapunov_ratio_scaled", b.lyapunov_ratio_scaled);
    r.Add("rr_lyapunov_bound", b.lyapunov_bound);
    r.Add("rr_regime", std::string(RrRegimeName(b.regime)));
  }

  std::string text;
  if (o.format == "json") {
    Json j;
    RunManifest manifest = BaseManifest("report", o.common, ch);
    j["manifest"] = ManifestJson(manifest);
    for (const auto& [key, value] : r.entries) j[key] = value;
    j["perfect_privacy"] = ch.IsIdentity();
    j["notes"] = r.notes;
    text = j.dump(2) + "\n";
  } else {
    text = RenderText(r);
  }
  return Emit(o.common.output, text, out);
}

absl::Status RunSimulate(const SimulateOptions& o, std::ostream& out) {
  SHUFFLE_DP_ASSIGN_OR_RETURN(Channel ch, LoadChannel(o.common.channel_path));
  SHUFFLE_DP_ASSIGN_OR_RETURN(Composition comp,
                              Composition::Create(o.common.n, o.common.k));
  SHUFFLE_DP_ASSIGN_OR_RETURN(Hypothesis hypothesis,
                              ParseHypothesis(o.hypothesis));
  const SimConfig cfg{o.seed, o.reps, o.workers};
  SHUFFLE_DP_ASSIGN_OR_RETURN(
      std::vector<double> samples,
      SamplePrivacyLoss(ch, comp, hypothesis, cfg, o.common.atom_cap));

  RunManifest manifest = BaseManifest("simulate", o.common, ch);
  manifest.parameters.emplace_back("hypothesis",
                                   std::string(HypothesisName(hypothesis)));
  // Worker count is deliberately absent: output must not depend on it.
  manifest.parameters.emplace_back(
      "sim_config", absl::StrCat("seed=", o.seed, " reps=", o.reps));
  std::string text = ManifestHeader(manifest) + SamplesCsv(samples);

  if (!samples.empty()) {
    // E_P[e^Lambda] = 1 and E_Q[e^-Lambda] = 1.
    const double sign = hypothesis == Hypothesis::kP ? 1.0 : -1.0;
    double sum = 0.0;
    double sum_lambda = 0.0;
    for (double x : samples) {
      sum += std::exp(sign * x);
      sum_lambda += x;
    }
    const double count = static_cast<double>(samples.size());
    const double mean = sum / count;
    double var = 0.0;
    for (double x : samples) {
      const double e = std::exp(sign * x) - mean;
      var += e * e;
    }
    const double se =
        samples.size() > 1 ? std::sqrt(var / (count - 1.0) / count) : 0.0;
    const char* key = hypothesis == Hypothesis::kP ? "mean_exp_lambda"
                                                   : "mean_exp_neg_lambda";
    absl::StrAppend(&text, "# summary: ", key, "=", FormatDouble(mean), "\n");
    absl::StrAppend(&text, "# summary: standard_error=", FormatDouble(se), "\n");
    absl::StrAppend(&text, "# summary: mean_lambda=",
                    FormatDouble(sum_lambda / count), "\n");
    SHUFFLE_DP_ASSIGN_OR_RETURN(GdpParams gdp, GdpMu(ch, comp.n, comp.pi(), 1));
    absl::StrAppend(&text, "# summary: mu=", FormatDouble(gdp.mu), "\n");
    if (gdp.mu > 0.0) {
      SHUFFLE_DP_ASSIGN_OR_RETURN(
          KolmogorovResult ks,
          KolmogorovFromSamples(samples, gdp.mu, hypothesis, o.gamma));
      absl::StrAppend(&text, "# summary: kolmogorov_distance=",
                      FormatDouble(ks.distance), "\n");
      absl::StrAppend(&text, "# summary: dkw_radius=",
                      FormatDouble(ks.dkw_radius), "\n");
    }
  }
  return Emit(o.common.output, text, out);
}

void AddCommon(CLI::App* cmd, CommonOptions* common) {
  cmd->add_option("--channel", common->channel_path,
                  "Channel JSON file {\"d\", \"W0\", \"W1\"}")
      ->required();
  cmd->add_option("--n", common->n, "Number of users")->required();
  cmd->add_option("--atom-cap", common->atom_cap,
                  "Largest histogram count enumerated exactly")
      ->capture_default_str();
  cmd->add_option("--output,-o", common->output, "Output file (default stdout)");
  cmd->add_flag("--stamp", common->stamp,
                "Add a UTC timestamp to the manifest header");
}

}  // namespace

int ExitCodeForStatus(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kOutOfRange:
      return kExitInvalidInput;
    case absl::StatusCode::kResourceExhausted:
      return kExitResourceCap;
    default:
      return kExitInternal;
  }
}

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Exact and asymptotic privacy accounting for shuffled "
               "finite-output randomizers",
               "shuffle_dp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CurveOptions curve;
  CLI::App* curve_cmd = app.add_subcommand("curve", "Emit an epsilon,delta curve");
  AddCommon(curve_cmd, &curve.common);
  curve_cmd->add_option("--k", curve.common.k, "Users holding 1 under P")
      ->capture_default_str();
  curve_cmd->add_option("--eps", curve.eps,
                        "Comma list or log:lo:hi:count")
      ->capture_default_str();
  curve_cmd->add_option("--sidedness", curve.sidedness,
                        "q-over-p, p-over-q or two-sided")
      ->capture_default_str();
  curve_cmd->add_option("--engine", curve.engine,
                        "exact, binomial, gdp or chernoff")
      ->capture_default_str();
  curve_cmd->add_option("--format", curve.format, "csv or json")
      ->capture_default_str();
  curve_cmd->add_option("--svg", curve.svg, "Also write an SVG plot here");
  curve_cmd->add_flag("--svg-log-y", curve.svg_log_y, "Log-scale delta axis");

  ReportOptions report;
  CLI::App* report_cmd =
      app.add_subcommand("report", "Print constants, expansions and bounds");
  AddCommon(report_cmd, &report.common);
  CLI::Option* k_opt =
      report_cmd->add_option("--k", report.common.k, "Users holding 1 under P");
  report_cmd->add_option("--pi", report.pi, "Composition proportion")
      ->excludes(k_opt);
  report_cmd->add_option("--m", report.m, "Messages per user")
      ->capture_default_str();
  report_cmd->add_option("--format", report.format, "text or json")
      ->capture_default_str();

  SimulateOptions sim;
  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "Sample the privacy loss");
  AddCommon(sim_cmd, &sim.common);
  sim_cmd->add_option("--k", sim.common.k, "Users holding 1 under P")
      ->capture_default_str();
  sim_cmd->add_option("--hypothesis", sim.hypothesis, "P or Q")
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "64-bit seed")->capture_default_str();
  sim_cmd->add_option("--reps", sim.reps, "Number of samples")
      ->capture_default_str();
  sim_cmd->add_option("--workers", sim.workers, "Worker threads")
      ->capture_default_str();
  sim_cmd->add_option("--gamma", sim.gamma,
                      "Confidence level for the DKW radius")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalidInput;
  }

  absl::Status status;
  if (curve_cmd->parsed()) {
    status = RunCurve(curve, out);
  } else if (report_cmd->parsed()) {
    status = RunReport(report, out);
  } else {
    status = RunSimulate(sim, out);
  }
  if (!status.ok()) {
    err << "error: " << status.message() << "\n";
    return ExitCodeForStatus(status);
  }
  return kExitOk;
}

}  // namespace shuffle_dp
