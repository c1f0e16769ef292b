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

import math

import pytest

import shuffle_dp as sd

LN3 = math.log(3.0)


def rr3():
    return sd.Channel.randomized_response(LN3)


def test_channel_properties():
    ch = rr3()
    assert ch.d == 2
    assert ch.w0 == pytest.approx([0.75, 0.25], abs=1e-15)
    assert ch.support == "FULL"
    same = sd.Channel.from_json(ch.to_json())
    assert same.fingerprint() == ch.fingerprint()
    with pytest.raises(ValueError):
        sd.Channel([0.7, 0.2], [0.5, 0.5])


def test_exact_curve_anchors():
    pts = sd.privacy_curve(rr3(), 2, eps=[0.0, math.log(2.0), LN3])
    assert [d for _, d in pts] == pytest.approx([3 / 8, 1 / 16, 0.0], abs=1e-15)
    default = sd.privacy_curve(rr3(), 12)
    binomial = sd.binomial_curve(rr3(), 12)
    assert len(default) == 64
    for (e1, d1), (e2, d2) in zip(default, binomial):
        assert e1 == e2
        assert d1 == pytest.approx(d2, abs=1e-12)


def test_atoms_and_divergences():
    atoms, q_only = sd.lr_atoms(rr3(), 2)
    assert q_only == 0.0
    assert [a[0] for a in atoms] == pytest.approx([1 / 3, 5 / 3, 3.0])
    assert sum(a[1] for a in atoms) == pytest.approx(1.0)
    div = sd.divergences(rr3(), 10, renyi_orders=[2.0])
    assert div["jsd"] > 0 and len(div["renyi"]) == 1


def test_fisher_and_gdp():
    ch = rr3()
    assert sd.fisher_constant(ch, 0.5) == pytest.approx(4 / 3, abs=1e-12)
    assert sd.fisher_via_mixture(ch, 0.3) == pytest.approx(
        sd.fisher_constant(ch, 0.3), rel=1e-9
    )
    mu, source = sd.gdp_mu(ch, 100, 0.5, 2)
    assert mu == pytest.approx(0.16329931618554522, rel=1e-14)
    assert source == "UNBUNDLED"
    assert sd.gdp_delta(0.0, 1.0) == pytest.approx(0.382924922548026207, abs=1e-15)
    jsd = sd.jsd_canonical_asymptotic(ch, 10)
    assert jsd["asymptotic"] == pytest.approx(0.0175, abs=1e-15)
    assert jsd["residual"] is not None


def test_bounds_and_multimessage():
    ch = rr3()
    assert sd.chernoff_delta(ch, 20, LN3) == 0.0
    assert sd.unbundled_lr(ch, 2, 2, [4, 0]) == pytest.approx(1 / 9, abs=1e-15)
    cmp = sd.mm_gdp_compare(ch, 2)
    assert cmp["ratio"] == pytest.approx(5 / 3, abs=1e-15)


def test_sampling_is_deterministic():
    ch = rr3()
    a = sd.sample_privacy_loss(ch, 30, seed=3, reps=500, workers=1)
    b = sd.sample_privacy_loss(ch, 30, seed=3, reps=500, workers=4)
    assert a == b
    same = sd.Channel([0.5, 0.5], [0.5, 0.5])
    assert set(sd.sample_privacy_loss(same, 10, reps=50)) == {0.0}


def test_rr_and_frequency():
    b = sd.rr_boundary(LN3, 100)
    assert b["a_n"] == pytest.approx(0.03)
    assert b["regime"] == "SUB_CRITICAL"
    f = sd.frequency_mse(LN3, 100, 0.5, seed=1, reps=2000)
    assert f["mse_bound"] == pytest.approx(0.01)


def test_cap_raises_memory_error():
    ch = sd.Channel([0.25] * 4, [0.1, 0.2, 0.3, 0.4])
    with pytest.raises(MemoryError):
        sd.lr_atoms(ch, 200, atom_cap=100)


def test_cli_entry_point():
    code, out, err = sd.run_cli(["--help"])
    assert code == 0
    code, out, err = sd.run_cli(["curve", "--n", "2"])
    assert code == 2
