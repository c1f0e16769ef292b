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

#include "shuffle_dp/simplex_linalg.h"

#include <cmath>
#include <string>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace shuffle_dp {
namespace {

absl::Status CheckPi(double pi) {
  if (!(pi >= 0.0 && pi <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("pi must lie in [0, 1], got ", pi));
  }
  return absl::OkStatus();
}

Eigen::VectorXd AsVector(const std::vector<double>& x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(),
                                           static_cast<Eigen::Index>(x.size()));
}

Eigen::MatrixXd BernoulliCovariance(const Eigen::VectorXd& w) {
  Eigen::MatrixXd sigma = -w * w.transpose();
  sigma.diagonal() += w;
  return sigma;
}

}  // namespace

absl::StatusOr<Eigen::MatrixXd> SigmaPi(const Channel& ch, double pi) {
  if (auto s = CheckPi(pi); !s.ok()) return s;
  const Eigen::VectorXd w0 = AsVector(ch.w0());
  const Eigen::VectorXd w1 = AsVector(ch.w1());
  return (1.0 - pi) * BernoulliCovariance(w0) + pi * BernoulliCovariance(w1);
}

absl::StatusOr<Eigen::MatrixXd> MixtureCovariance(const Channel& ch,
                                                  double pi) {
  if (auto s = CheckPi(pi); !s.ok()) return s;
  const Eigen::VectorXd f =
      (1.0 - pi) * AsVector(ch.w0()) + pi * AsVector(ch.w1());
  return BernoulliCovariance(f);
}

absl::StatusOr<FisherReport> FisherConstant(const Channel& ch, double pi) {
  if (auto s = CheckPi(pi); !s.ok()) return s;
  if (ch.support() != SupportClass::kFull) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Fisher constant needs full support, channel is ",
        std::string(SupportClassName(ch.support()))));
  }
  const int d = ch.d();
  const Eigen::VectorXd w0 = AsVector(ch.w0());
  const Eigen::VectorXd w1 = AsVector(ch.w1());
  const Eigen::VectorXd v = w1 - w0;

  FisherReport report;
  report.pi = pi;
  report.sigma_pi =
      (1.0 - pi) * BernoulliCovariance(w0) + pi * BernoulliCovariance(w1);
  report.f_pi = (1.0 - pi) * w0 + pi * w1;
  report.I_f = (v.array().square() / report.f_pi.array()).sum();

  const Eigen::MatrixXd reduced = report.sigma_pi.topLeftCorner(d - 1, d - 1);
  const Eigen::VectorXd v_reduced = v.head(d - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(reduced,
                                                     Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  report.condition_number =
      lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(report.condition_number <= kMaxReducedCondition)) {
    std::vector<int> light;
    for (int y = 0; y < d; ++y) {
      if (report.f_pi(y) < 1e-6) light.push_back(y);
    }
    return absl::FailedPreconditionError(absl::StrCat(
        "reduced covariance is numerically singular (condition ",
        report.condition_number, "); near-zero mixture mass at symbols [",
        absl::StrJoin(light, ","), "]"));
  }

  Eigen::LLT<Eigen::MatrixXd> llt(reduced);
  if (llt.info() != Eigen::Success) {
    return absl::FailedPreconditionError(
        "reduced covariance is not positive definite");
  }
  report.s_reduced = llt.solve(v_reduced);
  report.I_pi = v_reduced.dot(report.s_reduced);

  // Lift to T: pad the dropped coordinate with 0, then center.
  Eigen::VectorXd padded = Eigen::VectorXd::Zero(d);
  padded.head(d - 1) = report.s_reduced;
  report.s_pi = padded.array() - padded.mean();
  return report;
}

absl::StatusOr<double> FisherViaMixture(const Channel& ch, double pi) {
  if (auto s = CheckPi(pi); !s.ok()) return s;
  if (ch.support() != SupportClass::kFull) {
    return absl::InvalidArgumentError(absl::StrCat(
        "Fisher constant needs full support, channel is ",
        std::string(SupportClassName(ch.support()))));
  }
  double proxy = 0.0;
  for (int y = 0; y < ch.d(); ++y) {
    const double f = (1.0 - pi) * ch.w0()[y] + pi * ch.w1()[y];
    const double v = ch.w1()[y] - ch.w0()[y];
    proxy += v * v / f;
  }
  const double denom = 1.0 - pi * (1.0 - pi) * proxy;
  if (denom <= 1e-12) {
    return absl::FailedPreconditionError(absl::StrCat(
        "numerically degenerate channel: 1 - pi(1-pi) I_f = ", denom));
  }
  return proxy / denom;
}

}  // namespace shuffle_dp
