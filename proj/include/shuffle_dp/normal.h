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

#ifndef SHUFFLE_DP_NORMAL_H_
#define SHUFFLE_DP_NORMAL_H_

namespace shuffle_dp {

// Standard normal CDF through erfc, accurate in both tails.
double NormalCdf(double x);

// Standard normal density.
double NormalPdf(double x);

// Inverse CDF: rational initial guess refined by a Halley step. Returns
// -inf / +inf at 0 / 1 and NaN outside [0, 1].
double NormalQuantile(double p);

}  // namespace shuffle_dp

#endif  // SHUFFLE_DP_NORMAL_H_
