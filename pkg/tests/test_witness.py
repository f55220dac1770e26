from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import RHO4_TIMES_12, proj
from gmelab import witness as wmod
from gmelab.gilbert import GilbertConfig, run
from gmelab.partitions import PartySpec, SeparabilityClass
from gmelab.states import build_state, ghz_ket, separable_control
from gmelab.witness import (
    FLAG_INSIDE,
    FLAG_POSITIVE,
    build_witness,
    ghz_witness,
    ghz_witness_mean,
    lambda_max,
    max_on_samples,
    random_admissible,
    rho4_ghz_bound,
    rho4_ghz_witness,
    scaling_mean,
    witness_from_css,
)

BISEP = SeparabilityClass.biseparable()
FULL = SeparabilityClass.fully_separable()


def test_lambda_of_minus_identity():
    spec = PartySpec.qubits("ABCD")
    lam, per = lambda_max(-np.eye(16), BISEP, spec, restarts=2)
    assert lam == pytest.approx(-1, abs=1e-14)
    assert all(v == pytest.approx(-1, abs=1e-14) for v in per.values())
    assert list(per) == ["A|BCD", "B|ACD", "C|ABD", "D|ABC", "AB|CD", "AC|BD", "AD|BC"]


def test_lambda_needs_restarts():
    with pytest.raises(ValueError):
        lambda_max(np.eye(4), FULL, PartySpec.qubits("AB"), restarts=0)


def test_lambda_non_decreasing_in_restarts():
    s = build_state("rho3", theta=0.3)
    m = s.rho.matrix - np.eye(8) / 8
    values = [lambda_max(m, BISEP, s.spec, restarts=k, rng=5, sweeps=3)[1] for k in (1, 3, 9)]
    for a, b in zip(values, values[1:]):
        assert all(b[c] >= a[c] for c in a)


def test_ghz_witness_family():
    for n in (2, 3, 4, 5):
        assert ghz_witness_mean(proj(ghz_ket(n))) == pytest.approx(0.5, abs=1e-14)
    rho4 = RHO4_TIMES_12 / 12
    assert ghz_witness_mean(rho4) == pytest.approx(1 / 6, abs=1e-12)
    assert scaling_mean(4) == pytest.approx(1 / 6, abs=1e-12)
    assert scaling_mean(6) == pytest.approx(-0.1, abs=1e-12)
    with pytest.raises(ValueError):
        ghz_witness_mean(np.eye(6) / 6)
    with pytest.raises(ValueError):
        ghz_witness(1)


def test_rho4_ghz_witness_closed_form():
    w = rho4_ghz_witness()
    assert np.linalg.norm(w) == pytest.approx(1)
    assert np.trace((RHO4_TIMES_12 / 12) @ w).real == pytest.approx(29 / (12 * np.sqrt(15)))
    assert rho4_ghz_bound() == pytest.approx(0.1865, abs=5e-5)


def test_random_admissible_rows_are_biproducts(rng):
    spec = PartySpec.qubits("ABC", (1, 2, 1))
    psi = random_admissible(BISEP, spec, rng, 200)
    assert np.allclose(np.linalg.norm(psi, axis=1), 1)
    from gmelab.gilbert import factorizations

    facts = factorizations(BISEP, spec)
    for row in psi[:30]:
        sv = [np.linalg.svd(f.to_block_order(row).reshape(f.block_dims[0], -1), compute_uv=False)[1] for f in facts]
        assert min(sv) < 1e-12


def test_witness_on_rho3_zero():
    s = build_state("rho3", theta=0.0)
    r = run(s.rho, BISEP, s.spec, GilbertConfig(max_corrections=1000, rng_seed=1))
    rep = build_witness(r, restarts=20)
    assert rep.flag == ""
    assert 0.2 < rep.d_wit <= rep.d_last
    assert rep.lam == max(rep.per_class_max.values())
    assert rep.max_sampled <= 1e-9
    _, v = np.linalg.eigh(rep.witness)
    assert abs(np.vdot(ghz_ket(3), v[:, -1])) ** 2 >= 0.99


def test_witness_on_separable_control_is_zero():
    s = separable_control()
    r = run(s.rho, FULL, s.spec, GilbertConfig(max_corrections=300, rng_seed=3))
    rep = build_witness(r, restarts=10)
    assert rep.d_wit == 0


def test_witness_inside_set_flag():
    s = build_state("rho3", theta=0.0)
    rep = witness_from_css(s.rho.matrix, s.rho.matrix, BISEP, s.spec, restarts=3)
    assert rep.flag == FLAG_INSIDE
    assert rep.d_wit == 0 and rep.witness is None
    assert rep.to_json()["lambda"] is None


def test_positivity_violation_is_flagged(monkeypatch, caplog):
    def too_small(m, cls, spec, restarts, rng, atoms=None):
        return -1.0, {"A|BC": -1.0}

    monkeypatch.setattr(wmod, "lambda_max", too_small)
    s = build_state("rho3", theta=0.0)
    rep = witness_from_css(s.rho.matrix, np.eye(8) / 8, BISEP, s.spec, restarts=1, check_samples=2000)
    assert rep.flag == FLAG_POSITIVE
    assert rep.max_sampled > 0
    assert "underestimated" in caplog.text


@given(st.integers(0, 2**16))
@settings(max_examples=8, deadline=None)
def test_d_wit_never_exceeds_d_last(seed):
    s = build_state("rho3", theta=float(np.random.default_rng(seed).uniform(0, np.pi / 2)))
    r = run(s.rho, BISEP, s.spec, GilbertConfig(max_corrections=40, rng_seed=seed))
    rep = build_witness(r, restarts=3, check_samples=0)
    assert 0 <= rep.d_wit <= rep.d_last + 1e-12


def test_witness_non_positive_on_ten_thousand_samples():
    s = build_state("rho4")
    r = run(s.rho, BISEP, s.spec, GilbertConfig(max_corrections=200, rng_seed=8))
    rep = build_witness(r, restarts=10, check_samples=10_000)
    assert rep.flag == ""
    top = max_on_samples(rep.witness, BISEP, s.spec, 10_000, rng=99)
    assert top <= 1e-9
