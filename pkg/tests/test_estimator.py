from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gmelab.estimator import DegenerateHistoryError, estimate, pearson, trimmed
from gmelab.gilbert import GilbertConfig, run
from gmelab.operators import NumericalError
from gmelab.partitions import SeparabilityClass
from gmelab.states import build_state

C = np.arange(50, 5001, 50)


def test_recovers_synthetic_offset():
    res = estimate(list(zip(C, 0.04 + 1 / C)))
    assert res.d_est == pytest.approx(0.2, rel=0.01)
    assert res.r_star == pytest.approx(1, abs=1e-9)
    assert res.a_star < (0.04 + 1 / C).min()


def test_constant_history_is_degenerate():
    with pytest.raises(DegenerateHistoryError, match="degenerate"):
        estimate([(c, 0.1) for c in C])
    assert issubclass(DegenerateHistoryError, NumericalError)


def test_too_short_history():
    with pytest.raises(DegenerateHistoryError):
        estimate([(c, 1 / c) for c in C[:12]])
    # 14 points leave 10 after trimming
    estimate([(c, 0.01 + 1 / c) for c in C[:14]])


def test_trims_first_third():
    c, l = trimmed([(i, 1.0 / i) for i in range(1, 31)])
    assert c[0] == 11 and len(c) == 20


def test_pearson_matches_numpy(rng):
    x, y = rng.standard_normal(40), rng.standard_normal(40)
    assert pearson(x, y) == pytest.approx(np.corrcoef(x, y)[0, 1])
    assert np.isnan(pearson(x, np.ones(40)))


@given(
    st.floats(0.001, 0.2),
    st.floats(0.1, 10.0),
    st.floats(0.6, 1.4),
    st.floats(0.1, 50.0),
)
@settings(max_examples=40, deadline=None)
def test_estimate_properties(offset, scale, power, c_scale):
    l = offset + scale / C**power
    res = estimate(list(zip(C, l)))
    assert -1 <= res.r_star <= 1
    assert res.a_star < trimmed(list(zip(C, l)))[1].min()
    assert res.d_est <= np.sqrt(l.min()) + 1e-9
    scaled = estimate(list(zip(C * c_scale, l)))
    assert scaled.a_star == pytest.approx(res.a_star, rel=1e-6, abs=1e-9)


def test_estimate_below_last_distance_of_real_run():
    s = build_state("rho3", theta=0.0)
    r = run(s.rho, SeparabilityClass.biseparable(), s.spec, GilbertConfig(max_corrections=1000, record_interval=20))
    res = estimate(r.history)
    assert res.d_est <= r.d_last + 1e-9
