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

// Fixed-composition covariance and the Fisher constant of a channel.
//
// With a fraction pi of users drawing from W1 and the rest from W0, a
// single user's one-hot output has covariance
//
//   Sigma_pi = (1 - pi) (diag(W0) - W0 W0^T) + pi (diag(W1) - W1 W1^T),
//
// which annihilates the all-ones vector. The Fisher constant is
// I_pi = v^T Sigma_pi^+ v with v = W1 - W0, where the pseudoinverse acts on
// the zero-sum subspace T. It is evaluated in reduced coordinates: drop the
// last symbol, solve the (d-1)x(d-1) system, and lift the solution back to
// T by padding with zero and subtracting the mean.

#ifndef SHUFFLE_DP_SIMPLEX_LINALG_H_
#define SHUFFLE_DP_SIMPLEX_LINALG_H_

#include <Eigen/Dense>

#include "absl/status/statusor.h"
#include "shuffle_dp/channel.h"

namespace shuffle_dp {

// Reduced minors with an eigenvalue condition number above this are
// rejected.
inline constexpr double kMaxReducedCondition = 1e12;

struct FisherReport {
  double pi = 0.0;
  Eigen::MatrixXd sigma_pi;
  // v^T Sigma_pi^+ v.
  double I_pi = 0.0;
  // Multinomial proxy sum_y v(y)^2 / f_pi(y).
  double I_f = 0.0;
  // Sigma_pi^+ v, an element of the zero-sum subspace.
  Eigen::VectorXd s_pi;
  // Solution of the reduced system (first d-1 coordinates).
  Eigen::VectorXd s_reduced;
  // (1 - pi) W0 + pi W1.
  Eigen::VectorXd f_pi;
  double condition_number = 1.0;
};

absl::StatusOr<Eigen::MatrixXd> SigmaPi(const Channel& ch, double pi);

// diag(f_pi) - f_pi f_pi^T for the i.i.d. mixture f_pi.
absl::StatusOr<Eigen::MatrixXd> MixtureCovariance(const Channel& ch,
                                                  double pi);

// Requires a FULL channel and pi in [0, 1].
absl::StatusOr<FisherReport> FisherConstant(const Channel& ch, double pi);

// Closed form I_f / (1 - pi (1 - pi) I_f). Shares no code path with
// FisherConstant, so it serves as an oracle for it.
absl::StatusOr<double> FisherViaMixture(const Channel& ch, double pi);

}  // namespace shuffle_dp

#endif  // SHUFFLE_DP_SIMPLEX_LINALG_H_
