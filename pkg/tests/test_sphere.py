import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spherical_schwarz.sphere import (
    INFINITY,
    DiskAutomorphism,
    RigidMotion,
    SpherePoint,
    apply_disk_auto,
    apply_rigid,
    chordal_distance,
    chordal_distance_array,
    compose_rigid,
    hyperbolic_density,
    invert_rigid,
    spherical_density,
)

finite = st.floats(-1e3, 1e3, allow_nan=False)
cplx = st.builds(complex, finite, finite)
points = st.one_of(cplx.map(SpherePoint), st.just(INFINITY))
in_disk = st.builds(lambda r, t: r * complex(math.cos(t), math.sin(t)), st.floats(0, 0.99), st.floats(0, 2 * math.pi))


def _motion_or_skip(a, b):
    if abs(a) + abs(b) == 0:
        return RigidMotion(1, 0)
    return RigidMotion(a, b)


def test_sphere_point_tagging():
    assert INFINITY.is_infinite
    assert not SpherePoint(2j).is_infinite
    with pytest.raises(ValueError):
        SpherePoint(complex("inf"))
    assert SpherePoint.from_complex(1e200).is_infinite
    assert SpherePoint.from_complex(1e100).value == 1e100
    assert SpherePoint(0).reciprocal() == INFINITY
    assert INFINITY.reciprocal() == SpherePoint(0)


@pytest.mark.parametrize(
    "p, q, expected",
    [(0, INFINITY, 1.0), (0, 1, 1 / math.sqrt(2)), (1, -1, 1.0), (INFINITY, INFINITY, 0.0), (2j, 2j, 0.0)],
)
def test_chordal_examples(p, q, expected):
    assert chordal_distance(p, q) == pytest.approx(expected, abs=1e-15)


def test_chordal_array_matches_scalar():
    rng = np.random.default_rng(1)
    p = rng.normal(size=50) + 1j * rng.normal(size=50)
    q = rng.normal(size=50) * 10 + 1j * rng.normal(size=50)
    p[3] = complex("inf")
    q[7] = complex("inf")
    p[9] = q[9] = complex("inf")
    d = chordal_distance_array(p, q)
    for i in range(50):
        assert d[i] == pytest.approx(chordal_distance(p[i], q[i]), abs=1e-15)


@given(points, points)
def test_chordal_symmetric_bounded(p, q):
    d = chordal_distance(p, q)
    assert d == chordal_distance(q, p)
    assert 0.0 <= d <= 1.0 + 1e-15


@given(points, points, points)
def test_triangle_inequality(p, q, r):
    assert chordal_distance(p, r) <= chordal_distance(p, q) + chordal_distance(q, r) + 1e-12


def test_rigid_examples():
    assert apply_rigid(RigidMotion(1, 0), 1j) == SpherePoint(1j)
    T = RigidMotion(0, 1)
    assert apply_rigid(T, 2).value == pytest.approx(-0.5)
    assert apply_rigid(T, 0).is_infinite
    assert apply_rigid(T, INFINITY) == SpherePoint(0)


def test_rigid_renormalized():
    T = RigidMotion(3, 4j)
    assert abs(T.a) ** 2 + abs(T.b) ** 2 == pytest.approx(1, abs=1e-12)
    with pytest.raises(ValueError):
        RigidMotion(0, 0)


def test_isometry_random():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        T = RigidMotion.random(rng)
        p, q = (complex(*rng.normal(size=2)) * 10 ** rng.uniform(-3, 3) for _ in range(2))
        worst = max(worst, abs(chordal_distance(T(p), T(q)) - chordal_distance(p, q)))
    assert worst <= 1e-10


@given(cplx, cplx, cplx, cplx, points)
def test_compose_acts_as_composition(a1, b1, a2, b2, p):
    T1, T2 = _motion_or_skip(a1, b1), _motion_or_skip(a2, b2)
    lhs = apply_rigid(compose_rigid(T1, T2), p)
    rhs = apply_rigid(T1, apply_rigid(T2, p))
    assert chordal_distance(lhs, rhs) <= 1e-10


def test_group_axioms():
    rng = np.random.default_rng(3)
    ident = RigidMotion.identity()
    for _ in range(100):
        T, U, V = (RigidMotion.random(rng) for _ in range(3))
        e = compose_rigid(T, invert_rigid(T))
        assert abs(e.a - 1) <= 1e-12 and abs(e.b) <= 1e-12
        e = compose_rigid(invert_rigid(T), T)
        assert abs(e.a - 1) <= 1e-12 and abs(e.b) <= 1e-12
        L = compose_rigid(compose_rigid(T, U), V)
        R = compose_rigid(T, compose_rigid(U, V))
        assert np.max(np.abs(L.matrix - R.matrix)) <= 1e-12
        C = compose_rigid(ident, T)
        assert np.max(np.abs(C.matrix - T.matrix)) <= 1e-15


def test_inverse_of_negative_reciprocal():
    T = RigidMotion(0, 1)
    Ti = invert_rigid(T)
    for z in (0.3, 2 - 1j, -5j):
        back = apply_rigid(Ti, -1 / z)
        assert abs(back.value - z) <= 1e-12


def test_large_input_stable():
    T = RigidMotion(0.6, 0.8)
    z = 1e140
    w = apply_rigid(T, z).value
    assert w == pytest.approx(T.a / -T.b.conjugate(), rel=1e-12)


def test_disk_automorphism_basics():
    S = DiskAutomorphism(1, 0)
    assert apply_disk_auto(S, 0.3 + 0.2j) == pytest.approx(0.3 + 0.2j)
    z0, rot = 0.4 - 0.3j, np.exp(0.7j)
    S = DiskAutomorphism(rot, z0)
    assert S(0) == pytest.approx(rot * z0, abs=1e-15)
    theta = np.linspace(0, 2 * np.pi, 400)
    assert np.max(np.abs(np.abs(S(np.exp(1j * theta))) - 1)) <= 1e-12
    Si = S.inverse()
    for z in (0.1, -0.5j, 0.7 + 0.1j):
        assert Si(S(z)) == pytest.approx(z, abs=1e-14)
    assert S(S.zero) == pytest.approx(0, abs=1e-15)


def test_disk_automorphism_validation():
    with pytest.raises(ValueError):
        DiskAutomorphism(2, 0)
    with pytest.raises(ValueError):
        DiskAutomorphism(1, 1.0)
    with pytest.raises(ValueError):
        apply_disk_auto(DiskAutomorphism(1, 0.2), 1.5)


@given(in_disk, in_disk)
@settings(max_examples=50)
def test_disk_derivatives_finite_difference(z, c):
    S = DiskAutomorphism(1j, c * 0.9)
    h = 1e-6
    fd = (S(z + h) - S(z - h)) / (2 * h)
    assert S.derivative(z) == pytest.approx(fd, rel=1e-6, abs=1e-8)
    fd2 = (S.derivative(z + h) - S.derivative(z - h)) / (2 * h)
    assert S.second_derivative(z) == pytest.approx(fd2, rel=1e-5, abs=1e-6)


def test_densities():
    assert hyperbolic_density(0) == 1.0
    assert spherical_density(0) == 1.0
    assert spherical_density(1) == 0.5
    assert spherical_density(INFINITY) == 0.0
    with pytest.raises(ValueError):
        hyperbolic_density(1.0)


def test_tiny_coefficients_normalize():
    T = RigidMotion(0j, 1.7403222701500776e-266j)
    assert T.a == 0 and T.b == pytest.approx(1j)
