"""Riemann sphere and unit disk geometry.

Conventions: the chordal distance carries no factor 2,

    d(p, q) = |p - q| / sqrt((1 + |p|^2)(1 + |q|^2)),

so the spherical density is 1/(1 + |z|^2) and the hyperbolic density on the
disk is 1/(1 - |z|^2).  These are the normalizations under which the
spherical derivative |f'|/(1 + |f|^2) measures length distortion.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

#: modulus above which an intermediate Moebius value is treated as the point at infinity
OVERFLOW_THRESHOLD = 1e150


@dataclass(frozen=True)
class SpherePoint:
    """A point of the Riemann sphere.  ``value is None`` encodes infinity."""

    value: Optional[complex] = 0j

    def __post_init__(self):
        if self.value is None:
            return
        v = complex(self.value)
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise ValueError(
                "non-finite value for a finite SpherePoint; use SpherePoint.from_complex "
                "to convert overflowing values to infinity explicitly"
            )
        object.__setattr__(self, "value", v)

    @property
    def is_infinite(self) -> bool:
        return self.value is None

    @classmethod
    def from_complex(cls, z, overflow: float = OVERFLOW_THRESHOLD) -> "SpherePoint":
        """Explicit conversion: inf, nan-free overflow or |z| > overflow map to infinity."""
        z = complex(z)
        if not (math.isfinite(z.real) and math.isfinite(z.imag)) or abs(z) > overflow:
            return INFINITY
        return cls(z)

    def reciprocal(self) -> "SpherePoint":
        if self.value is None:
            return SpherePoint(0j)
        if self.value == 0:
            return INFINITY
        return SpherePoint(1.0 / self.value)

    def __complex__(self) -> complex:
        return complex("inf") if self.value is None else self.value

    def __repr__(self) -> str:
        return "SpherePoint(inf)" if self.value is None else f"SpherePoint({self.value!r})"


INFINITY = SpherePoint(None)

PointLike = Union[SpherePoint, complex, float, int]


def as_point(p: PointLike) -> SpherePoint:
    if isinstance(p, SpherePoint):
        return p
    return SpherePoint.from_complex(p)


def chordal_distance(p: PointLike, q: PointLike) -> float:
    p, q = as_point(p), as_point(q)
    if p.is_infinite and q.is_infinite:
        return 0.0
    if p.is_infinite:
        return 1.0 / math.hypot(1.0, abs(q.value))
    if q.is_infinite:
        return 1.0 / math.hypot(1.0, abs(p.value))
    return abs(p.value - q.value) / (math.hypot(1.0, abs(p.value)) * math.hypot(1.0, abs(q.value)))


def chordal_distance_array(p, q) -> np.ndarray:
    """Vectorized chordal distance for finite complex arrays (inf entries allowed)."""
    p = np.asarray(p, dtype=complex)
    q = np.asarray(q, dtype=complex)
    pinf = ~np.isfinite(p)
    qinf = ~np.isfinite(q)
    ap = np.where(pinf, 0.0, np.abs(np.where(pinf, 0, p)))
    aq = np.where(qinf, 0.0, np.abs(np.where(qinf, 0, q)))
    with np.errstate(invalid="ignore"):
        d = np.abs(np.where(pinf, 0, p) - np.where(qinf, 0, q)) / (np.hypot(1, ap) * np.hypot(1, aq))
    d = np.where(pinf & ~qinf, 1.0 / np.hypot(1, aq), d)
    d = np.where(qinf & ~pinf, 1.0 / np.hypot(1, ap), d)
    d = np.where(pinf & qinf, 0.0, d)
    return d


@dataclass(frozen=True)
class RigidMotion:
    """Spherical isometry z -> (a z + b) / (-conj(b) z + conj(a)), |a|^2 + |b|^2 = 1.

    The coefficients are renormalized on construction.
    """

    a: complex = 1 + 0j
    b: complex = 0j

    def __post_init__(self):
        a, b = complex(self.a), complex(self.b)
        n = math.hypot(abs(a), abs(b))  # no underflow for tiny coefficients
        if n == 0.0:
            raise ValueError("rigid motion needs (a, b) != (0, 0)")
        object.__setattr__(self, "a", a / n)
        object.__setattr__(self, "b", b / n)

    @classmethod
    def identity(cls) -> "RigidMotion":
        return cls(1, 0)

    @classmethod
    def random(cls, rng: np.random.Generator) -> "RigidMotion":
        """Haar-random element (uniform on the 3-sphere of (a, b))."""
        x = rng.standard_normal(4)
        return cls(complex(x[0], x[1]), complex(x[2], x[3]))

    @property
    def matrix(self) -> np.ndarray:
        a, b = self.a, self.b
        return np.array([[a, b], [-b.conjugate(), a.conjugate()]])

    def __call__(self, p: PointLike) -> SpherePoint:
        return apply_rigid(self, p)

    def apply_array(self, z: np.ndarray) -> np.ndarray:
        """Vectorized action on finite complex arrays; poles come back as inf."""
        z = np.asarray(z, dtype=complex)
        num = self.a * z + self.b
        den = -self.b.conjugate() * z + self.a.conjugate()
        with np.errstate(divide="ignore", invalid="ignore"):
            out = num / den
        return np.where(den == 0, complex("inf"), out)

    def derivative(self, z: complex) -> complex:
        return 1.0 / (-self.b.conjugate() * z + self.a.conjugate()) ** 2


def apply_rigid(T: RigidMotion, p: PointLike, overflow: float = OVERFLOW_THRESHOLD) -> SpherePoint:
    p = as_point(p)
    a, b = T.a, T.b
    if p.is_infinite:
        if b == 0:
            return INFINITY
        return SpherePoint.from_complex(a / (-b.conjugate()), overflow)
    z = p.value
    if abs(z) > 1.0:
        # divide through by z to keep large inputs stable
        u = 1.0 / z
        num = a + b * u
        den = -b.conjugate() + a.conjugate() * u
    else:
        num = a * z + b
        den = -b.conjugate() * z + a.conjugate()
    if den == 0:
        return INFINITY
    return SpherePoint.from_complex(num / den, overflow)


def compose_rigid(T1: RigidMotion, T2: RigidMotion) -> RigidMotion:
    """The motion p -> T1(T2(p))."""
    return RigidMotion(
        T1.a * T2.a - T1.b * T2.b.conjugate(),
        T1.a * T2.b + T1.b * T2.a.conjugate(),
    )


def invert_rigid(T: RigidMotion) -> RigidMotion:
    return RigidMotion(T.a.conjugate(), -T.b)


@dataclass(frozen=True)
class DiskAutomorphism:
    """z -> rotation * (z + center) / (1 + conj(center) z) with |center| < 1."""

    rotation: complex = 1 + 0j
    center: complex = 0j

    def __post_init__(self):
        rot = complex(self.rotation)
        if abs(abs(rot) - 1.0) > 1e-12:
            raise ValueError(f"rotation must be unimodular, got |rotation| = {abs(rot)!r}")
        c = complex(self.center)
        if not abs(c) < 1.0:
            raise ValueError(f"center must lie in the open unit disk, got |center| = {abs(c)!r}")
        object.__setattr__(self, "rotation", rot / abs(rot))
        object.__setattr__(self, "center", c)

    @property
    def zero(self) -> complex:
        """The preimage of 0."""
        return -self.center

    def __call__(self, z):
        c = self.center
        return self.rotation * (z + c) / (1 + c.conjugate() * z)

    def derivative(self, z):
        c = self.center
        return self.rotation * (1 - abs(c) ** 2) / (1 + c.conjugate() * z) ** 2

    def second_derivative(self, z):
        c = self.center
        return -2 * self.rotation * c.conjugate() * (1 - abs(c) ** 2) / (1 + c.conjugate() * z) ** 3

    def inverse(self) -> "DiskAutomorphism":
        # w = r (z + c)/(1 + c̄ z)  <=>  z = (w/r - c)/(1 - c̄ w/r)
        r = self.rotation
        return DiskAutomorphism(r.conjugate(), -self.center * r)


def _check_disk(z, allow_boundary: bool = False):
    m = np.max(np.abs(np.asarray(z)))
    if allow_boundary:
        if m > 1.0 + 1e-12:
            raise ValueError(f"point outside the closed unit disk: |z| = {m!r}")
    elif not m < 1.0:
        raise ValueError(f"point outside the open unit disk: |z| = {m!r}")


def apply_disk_auto(S: DiskAutomorphism, z, *, allow_boundary: bool = False):
    _check_disk(z, allow_boundary)
    return S(z)


def hyperbolic_density(z):
    _check_disk(z)
    return 1.0 / (1.0 - np.abs(z) ** 2)


def spherical_density(p):
    """1/(1 + |p|^2); zero at infinity."""
    if isinstance(p, SpherePoint):
        return 0.0 if p.is_infinite else 1.0 / (1.0 + abs(p.value) ** 2)
    p = np.asarray(p, dtype=complex)
    with np.errstate(over="ignore"):
        out = 1.0 / (1.0 + np.abs(p) ** 2)
    return out if out.ndim else float(out)


def unit(theta: float) -> complex:
    return cmath.exp(1j * theta)
