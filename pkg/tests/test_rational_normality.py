import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spherical_schwarz.errors import InfeasibleLevelError
from spherical_schwarz.functions import RationalFunction
from spherical_schwarz.rational_normality import (
    DEFAULT_POLES,
    PolePrescription,
    bernstein_factor,
    evaluate_rational,
    kn,
    norm_bound,
    rational_campaign,
    sup_norm,
    write_rows_csv,
)

# mpmath reference: (3/(2*0.1)) (1 + sqrt(1 - 4*0.01/9))
NORM_BOUND_3_01 = 29.966629547095766

outside_poles = st.lists(
    st.builds(
        lambda r, t: r * complex(math.cos(t), math.sin(t)),
        st.floats(1.05, 5.0),
        st.floats(0, 2 * math.pi),
    ),
    min_size=1,
    max_size=5,
)


def test_pole_validation():
    with pytest.raises(ValueError):
        PolePrescription((0.5,))
    with pytest.raises(ValueError):
        PolePrescription((2.0, 1.0))
    with pytest.raises(ValueError):
        PolePrescription(())
    p = PolePrescription(DEFAULT_POLES)
    assert p.degree == 3
    assert np.allclose(np.polynomial.polynomial.polyval(np.array(DEFAULT_POLES), p.denominator()), 0)


def test_bernstein_factor_examples():
    p = PolePrescription((2.0,))
    assert bernstein_factor(p, 1.0) == pytest.approx(3.0)
    assert bernstein_factor(p, -1.0) == pytest.approx(1 / 3)
    assert bernstein_factor(PolePrescription((2.0, 2.0)), 1.0) == pytest.approx(6.0)
    with pytest.raises(ValueError):
        bernstein_factor(p, 0.5)


def test_kn_examples():
    assert kn(PolePrescription((2.0,))) == pytest.approx(3.0)
    assert kn(PolePrescription((2.0, 3.0))) == pytest.approx(5.0)
    assert kn(PolePrescription((1.1,))) == pytest.approx(21.0)


def test_norm_bound_values():
    p = PolePrescription((2.0,))
    assert norm_bound(p, 0.1) == pytest.approx(NORM_BOUND_3_01, rel=1e-15)
    assert norm_bound(p, 1.5) == pytest.approx(1.0)  # c = k/2 closes the square root
    with pytest.raises(InfeasibleLevelError):
        norm_bound(p, 1.6)
    with pytest.raises(ValueError):
        norm_bound(p, 0.0)


def test_norm_bound_decreasing_in_level():
    p = PolePrescription(DEFAULT_POLES)
    cs = np.linspace(0.01, 0.5, 50)
    vals = np.array([norm_bound(p, c) for c in cs])
    assert np.all(np.diff(vals) < 0)


@given(outside_poles)
@settings(max_examples=50, deadline=None)
def test_bernstein_factor_dominated(poles):
    p = PolePrescription(tuple(poles))
    theta = 2 * np.pi * np.arange(512) / 512
    K = bernstein_factor(p, np.exp(1j * theta))
    assert np.all(K > 0)
    assert np.max(K) <= kn(p) * (1 + 1e-12)


def test_bernstein_factor_attains_kn_for_real_positive_poles():
    p = PolePrescription((2.0, 3.0, 5.0))
    assert bernstein_factor(p, 1.0) == pytest.approx(kn(p), rel=1e-14)


def test_sup_norm_simple_pole():
    f = RationalFunction([1], [-2, 1])
    norm, angle = sup_norm(f)
    assert norm == pytest.approx(1.0, rel=1e-12)
    assert min(angle, 2 * math.pi - angle) <= 1e-4


def test_sup_norm_refines_beyond_sampling():
    f = RationalFunction([1], np.polynomial.polynomial.polyfromroots([1.2 * np.exp(0.123j)]))
    norm, _ = sup_norm(f, samples=64)
    assert norm == pytest.approx(5.0, rel=1e-9)


def test_evaluate_simple_pole():
    # f# = 1/(1 + |z - 2|^2), smallest at z = -1
    row = evaluate_rational(PolePrescription((2.0,)), [1])
    assert row is not None
    assert row.c_f == pytest.approx(0.1, abs=1e-3)
    assert row.norm == pytest.approx(1.0, rel=1e-12)
    assert row.k_n == 3.0
    assert row.holds and row.margin > 0


def test_evaluate_rejects_inadmissible():
    p = PolePrescription((2.0,))
    assert evaluate_rational(p, [-2, 1]) is None  # cancels the pole
    assert evaluate_rational(PolePrescription((2.0, 3.0)), [0, 0, 1]) is None  # f' vanishes at the origin


def test_small_campaign():
    p = PolePrescription(DEFAULT_POLES)
    rows = rational_campaign(p, 8, seed=3)
    assert len(rows) == 8
    assert all(r.holds and r.margin >= 0 for r in rows)
    assert all(0 < r.c_f <= 0.5 for r in rows)
    assert rows == rational_campaign(p, 8, seed=3)
    buf = io.StringIO()
    write_rows_csv(rows, buf)
    assert len(buf.getvalue().strip().splitlines()) == 9


def test_campaign_threads_env(monkeypatch):
    p = PolePrescription(DEFAULT_POLES)
    serial = rational_campaign(p, 4, seed=11)
    monkeypatch.setenv("SPHERICAL_SCHWARZ_THREADS", "4")
    assert rational_campaign(p, 4, seed=11) == serial
