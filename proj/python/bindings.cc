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

// Python bindings for the main operations. Status errors become Python
// exceptions: invalid input raises ValueError, exceeded caps MemoryError,
// anything else RuntimeError.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "shuffle_dp/asymptotics.h"
#include "shuffle_dp/bounds.h"
#include "shuffle_dp/channel.h"
#include "shuffle_dp/cli.h"
#include "shuffle_dp/exact_dist.h"
#include "shuffle_dp/io.h"
#include "shuffle_dp/montecarlo.h"
#include "shuffle_dp/multimessage.h"
#include "shuffle_dp/simplex_linalg.h"

namespace py = pybind11;

namespace shuffle_dp {
namespace {

void Throw(const absl::Status& status) {
  const std::string message(status.message());
  switch (status.code()) {
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kFailedPrecondition:
    case absl::StatusCode::kOutOfRange:
      throw py::value_error(message);
    case absl::StatusCode::kResourceExhausted:
      throw std::bad_alloc();  // surfaces as MemoryError
    default:
      throw std::runtime_error(message);
  }
}

template <typename T>
T Get(absl::StatusOr<T> s) {
  if (!s.ok()) Throw(s.status());
  return *std::move(s);
}

std::vector<std::pair<double, double>> Points(const PrivacyCurve& curve) {
  std::vector<std::pair<double, double>> out;
  out.reserve(curve.points.size());
  for (const CurvePoint& p : curve.points) out.emplace_back(p.epsilon, p.delta);
  return out;
}

std::vector<double> Grid(const std::vector<double>& eps) {
  return eps.empty() ? Get(ParseEpsGrid(kDefaultEpsGrid)) : eps;
}

Sidedness SidednessOf(const std::string& name) {
  return Get(ParseSidedness(name));
}

}  // namespace
}  // namespace shuffle_dp

PYBIND11_MODULE(_core, m) {
  using namespace shuffle_dp;  // NOLINT
  m.doc() = "Exact and asymptotic privacy accounting for shuffled channels.";

  py::class_<Channel>(m, "Channel")
      .def(py::init([](const std::vector<double>& w0,
                       const std::vector<double>& w1) {
             return Get(Channel::Create(w0, w1));
           }),
           py::arg("w0"), py::arg("w1"))
      .def_static(
          "from_json",
          [](const std::string& text) { return Get(ChannelFromJson(text)); })
      .def_static(
          "randomized_response",
          [](double eps0) { return Get(RandomizedResponseChannel(eps0)); },
          py::arg("eps0"))
      .def("to_json", &ChannelToJson)
      .def("fingerprint", &ChannelFingerprint)
      .def_property_readonly("d", &Channel::d)
      .def_property_readonly("w0", &Channel::w0)
      .def_property_readonly("w1", &Channel::w1)
      .def_property_readonly(
          "support",
          [](const Channel& ch) {
            return std::string(SupportClassName(ch.support()));
          })
      .def_property_readonly("delta_star", &Channel::delta_star)
      .def_property_readonly("delta_full", &Channel::delta_full)
      .def("__repr__", [](const Channel& ch) {
        return "Channel(" + ChannelToJson(ch) + ")";
      });

  m.def(
      "score_stats",
      [](const Channel& ch) {
        ScoreStats s = Get(ComputeScoreStats(ch));
        py::dict out;
        out["chi2"] = s.chi2;
        out["mu3"] = s.mu3;
        out["w_max"] = s.w_max;
        out["delta_star"] = s.delta_star;
        return out;
      },
      py::arg("channel"));

  m.def(
      "lr_atoms",
      [](const Channel& ch, int n, int k, double cap) {
        LrAtomization a = Get(ComputeLrAtoms(ch, Composition{n, k}, cap));
        std::vector<std::tuple<double, double, double>> atoms;
        for (const LrAtom& x : a.atoms) {
          atoms.emplace_back(x.ratio, x.p_mass, x.q_mass);
        }
        return std::make_pair(atoms, a.q_only_mass);
      },
      py::arg("channel"), py::arg("n"), py::arg("k") = 0,
      py::arg("atom_cap") = kDefaultAtomCap,
      "Returns ([(ratio, p_mass, q_mass), ...], q_only_mass).");

  m.def(
      "privacy_curve",
      [](const Channel& ch, int n, int k, const std::vector<double>& eps,
         const std::string& sidedness, double cap) {
        LrAtomization a = Get(ComputeLrAtoms(ch, Composition{n, k}, cap));
        return Points(
            Get(ComputePrivacyCurve(a, Grid(eps), SidednessOf(sidedness))));
      },
      py::arg("channel"), py::arg("n"), py::arg("k") = 0,
      py::arg("eps") = std::vector<double>(),
      py::arg("sidedness") = "q-over-p", py::arg("atom_cap") = kDefaultAtomCap,
      "Exact (epsilon, delta) pairs; empty eps means the default grid.");

  m.def(
      "binomial_curve",
      [](const Channel& ch, int n, const std::vector<double>& eps) {
        return Points(Get(BinomialCurve(ch, n, Grid(eps))));
      },
      py::arg("channel"), py::arg("n"), py::arg("eps") = std::vector<double>());

  m.def(
      "divergences",
      [](const Channel& ch, int n, int k, const std::vector<double>& orders) {
        LrAtomization a = Get(ComputeLrAtoms(ch, Composition{n, k}));
        DivergenceReport r = Get(ComputeDivergences(a, orders));
        py::dict out;
        out["jsd"] = r.jsd;
        out["tv"] = r.tv;
        out["chi2"] = r.chi2;
        out["kl"] = r.kl;
        out["renyi"] = r.renyi;
        return out;
      },
      py::arg("channel"), py::arg("n"), py::arg("k") = 0,
      py::arg("renyi_orders") = std::vector<double>());

  m.def(
      "fisher_constant",
      [](const Channel& ch, double pi) { return Get(FisherConstant(ch, pi)).I_pi; },
      py::arg("channel"), py::arg("pi"));
  m.def(
      "fisher_via_mixture",
      [](const Channel& ch, double pi) { return Get(FisherViaMixture(ch, pi)); },
      py::arg("channel"), py::arg("pi"));

  m.def(
      "gdp_mu",
      [](const Channel& ch, int n, double pi, int mm) {
        GdpParams g = Get(GdpMu(ch, n, pi, mm));
        return std::make_pair(g.mu, std::string(GdpSourceName(g.source)));
      },
      py::arg("channel"), py::arg("n"), py::arg("pi") = 0.0, py::arg("m") = 1,
      "Returns (mu, source).");
  m.def(
      "gdp_delta", [](double eps, double mu) { return Get(GdpDelta(eps, mu)); },
      py::arg("eps"), py::arg("mu"));
  m.def(
      "jsd_canonical_asymptotic",
      [](const Channel& ch, int n) {
        ExpansionReport r = Get(JsdCanonicalAsymptotic(ch, n));
        py::dict out;
        out["asymptotic"] = r.asymptotic;
        out["terms"] = r.terms;
        out["exact"] = r.exact ? py::cast(*r.exact) : py::none();
        out["residual"] = r.residual ? py::cast(*r.residual) : py::none();
        return out;
      },
      py::arg("channel"), py::arg("n"));

  m.def(
      "chernoff_delta",
      [](const Channel& ch, int n, double eps) {
        return Get(ChernoffDelta(ch, n, eps)).bound;
      },
      py::arg("channel"), py::arg("n"), py::arg("eps"));

  m.def(
      "unbundled_lr",
      [](const Channel& ch, int n, int mm, const std::vector<int>& histogram) {
        return Get(UnbundledLr(ch, n, mm, histogram));
      },
      py::arg("channel"), py::arg("n"), py::arg("m"), py::arg("histogram"));
  m.def(
      "mm_gdp_compare",
      [](const Channel& ch, int mm) {
        MmComparison c = Get(MmGdpCompare(ch, mm));
        py::dict out;
        out["mu_unb_sq_times_n"] = c.mu_unb_sq_times_n;
        out["mu_bund_sq_times_n"] = c.mu_bund_sq_times_n;
        out["ratio"] = c.ratio;
        out["ratio_lower_bound"] = c.ratio_lower_bound;
        out["perfect_privacy"] = c.perfect_privacy;
        return out;
      },
      py::arg("channel"), py::arg("m"));

  m.def(
      "sample_privacy_loss",
      [](const Channel& ch, int n, int k, const std::string& hypothesis,
         uint64_t seed, int64_t reps, int workers) {
        SimConfig cfg{seed, reps, workers};
        Hypothesis h = Get(ParseHypothesis(hypothesis));
        py::gil_scoped_release release;
        return Get(SamplePrivacyLoss(ch, Composition{n, k}, h, cfg));
      },
      py::arg("channel"), py::arg("n"), py::arg("k") = 0,
      py::arg("hypothesis") = "P", py::arg("seed") = 0, py::arg("reps") = 1000,
      py::arg("workers") = 1);

  m.def(
      "rr_boundary",
      [](double eps0, int n) {
        RrBoundary b = Get(ComputeRrBoundary(eps0, n));
        py::dict out;
        out["q_n"] = b.q_n;
        out["a_n"] = b.a_n;
        out["sigma2"] = b.sigma2;
        out["rho3"] = b.rho3;
        out["lyapunov_bound"] = b.lyapunov_bound;
        out["lyapunov_ratio"] = b.lyapunov_ratio;
        out["regime"] = std::string(RrRegimeName(b.regime));
        return out;
      },
      py::arg("eps0"), py::arg("n"));

  m.def(
      "frequency_mse",
      [](double eps0, int n, double p, uint64_t seed, int64_t reps,
         int workers) {
        FrequencyMseResult r =
            Get(FrequencyMse(eps0, n, p, SimConfig{seed, reps, workers}));
        py::dict out;
        out["mse_estimate"] = r.mse_estimate;
        out["mse_standard_error"] = r.mse_standard_error;
        out["mse_bound"] = r.mse_bound;
        out["bias"] = r.bias;
        out["bias_standard_error"] = r.bias_standard_error;
        return out;
      },
      py::arg("eps0"), py::arg("n"), py::arg("p_true"), py::arg("seed") = 0,
      py::arg("reps") = 10000, py::arg("workers") = 1);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::vector<std::string> full = {"shuffle_dp"};
        full.insert(full.end(), args.begin(), args.end());
        std::vector<const char*> argv;
        for (const std::string& a : full) argv.push_back(a.c_str());
        std::ostringstream out;
        std::ostringstream err;
        const int code =
            RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
        return std::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line tool; returns (code, stdout, stderr).");

  m.attr("__version__") = std::string(kToolVersion);
}
