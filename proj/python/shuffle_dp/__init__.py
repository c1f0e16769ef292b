# Copyright 2026 The shuffle_dp Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Privacy accounting for shuffled binary-input channels."""

from shuffle_dp._core import (
    Channel,
    __version__,
    binomial_curve,
    chernoff_delta,
    divergences,
    fisher_constant,
    fisher_via_mixture,
    frequency_mse,
    gdp_delta,
    gdp_mu,
    jsd_canonical_asymptotic,
    lr_atoms,
    mm_gdp_compare,
    privacy_curve,
    rr_boundary,
    run_cli,
    sample_privacy_loss,
    score_stats,
    unbundled_lr,
)

__all__ = [
    "Channel",
    "__version__",
    "binomial_curve",
    "chernoff_delta",
    "divergences",
    "fisher_constant",
    "fisher_via_mixture",
    "frequency_mse",
    "gdp_delta",
    "gdp_mu",
    "jsd_canonical_asymptotic",
    "lr_atoms",
    "mm_gdp_compare",
    "privacy_curve",
    "rr_boundary",
    "run_cli",
    "sample_privacy_loss",
    "score_stats",
    "unbundled_lr",
]
