"""Refined Schwarz-Pick bound for self-maps with a zero of order >= 1 and w''(z0) = 0.

Every holomorphic w: D -> D with w(z0) = 0 factors as w = phi * g with
phi(z) = (z - z0)/(1 - conj(z0) z) and g: D -> closed disk.  The condition
w''(z0) = 0 reads

    g'(z0) = -conj(z0) g(z0) / (1 - |z0|^2),

and together with Schwarz-Pick for g it caps |g(z0)|, hence |w'(z0)|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .errors import ConvergenceError
from .functions import BlaschkeProduct, MeroFunction, RationalFunction
from .sphere import DiskAutomorphism


def sp_bound(s: float) -> float:
    """(sqrt(4 + s^2) - s) / (2 (1 - s^2)) for 0 < s < 1."""
    if s == 0:
        raise ValueError("s = 0 is excluded; use sp_bound_classical(0) = 1 at the origin")
    if not 0.0 < s < 1.0:
        raise ValueError(f"|z0| must lie in (0, 1), got {s!r}")
    return 2.0 / (math.sqrt(4.0 + s * s) + s) / (1.0 - s * s)


def sp_bound_classical(s: float) -> float:
    """Plain Schwarz-Pick: |w'(z0)| <= 1/(1 - |z0|^2)."""
    if not 0.0 <= s < 1.0:
        raise ValueError(f"|z0| must lie in [0, 1), got {s!r}")
    return 1.0 / (1.0 - s * s)


def _phi(z0: complex) -> RationalFunction:
    return RationalFunction([-z0, 1], [1, -z0.conjugate()], check=False)


@dataclass(frozen=True)
class ConstrainedSelfMap:
    """w(z) = (z - z0)/(1 - conj(z0) z) * scale * g(z)."""

    z0: complex
    inner_factor: MeroFunction
    scale: float = 1.0

    def __post_init__(self):
        if not 0 < abs(self.z0) < 1:
            raise ValueError("need 0 < |z0| < 1")
        if not 0 < self.scale <= 1:
            raise ValueError("scale must lie in (0, 1]")

    def as_rational(self) -> RationalFunction:
        return _phi(complex(self.z0)) * (self.inner_factor.to_rational() * self.scale)

    def derivatives_at_z0(self):
        """(w(z0), w'(z0), w''(z0)) from the exact jet of the product."""
        (w, w1, w2), _ = self.as_rational().jet(complex(self.z0), 2)
        return complex(w), complex(w1), complex(w2)

    def values(self, z):
        return self.as_rational().values(z)


def _constraint(p: complex, z0: complex) -> complex:
    """(1 - |p|^2)(1 - s^2) + conj(z0)(1 - conj(p) z0)(z0 - p), zero at extremal p."""
    s2 = abs(z0) ** 2
    return 1 - abs(p) ** 2 * (1 - 2 * s2) - z0.conjugate() * p - s2 * z0 * p.conjugate()


def _newton(p: complex, z0: complex, tol: float = 1e-15, maxiter: int = 50) -> complex:
    """2-D Newton on the real and imaginary parts of the constraint."""
    s2 = abs(z0) ** 2
    for _ in range(maxiter):
        F = _constraint(p, z0)
        if abs(F) < tol:
            return p
        # F_p dp + F_pbar conj(dp) = -F
        Fp = -p.conjugate() * (1 - 2 * s2) - z0.conjugate()
        Fq = -p * (1 - 2 * s2) - s2 * z0
        # real 2x2 system in (Re dp, Im dp)
        A = np.array([[(Fp + Fq).real, (-Fp.imag + Fq.imag)], [(Fp + Fq).imag, (Fp.real - Fq.real)]])
        rhs = np.array([-F.real, -F.imag])
        dx, dy = np.linalg.solve(A, rhs)
        p = p + complex(dx, dy)
    if abs(_constraint(p, z0)) < 1e-12:
        return p
    raise ConvergenceError(f"Newton iteration for the extremal parameter did not converge (|F| = {abs(_constraint(p, z0)):.3e})")


def real_axis_roots(s: float) -> List[float]:
    """Real roots of p^2 (2 s^2 - 1) - p s (1 + s^2) + 1 = 0."""
    a, b, c = 2 * s * s - 1, -s * (1 + s * s), 1.0
    if abs(a) < 1e-15:
        return [-c / b]
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    r = math.sqrt(disc)
    # stable pair: q = -(b + sign(b) r)/2
    q = -0.5 * (b + math.copysign(r, b))
    return sorted([q / a, c / q])


def extremal_parameters(z0: complex) -> List[complex]:
    """All inside-disk zeros p of the extremal automorphism, refined by Newton."""
    z0 = complex(z0)
    s = abs(z0)
    if not 0 < s < 1:
        raise ValueError("need 0 < |z0| < 1")
    rot = z0 / s
    out = []
    for q in real_axis_roots(s):
        p = _newton(rot * q, z0)
        if abs(p) < 1:
            out.append(p)
    return out


def construct_extremal_automorphism(z0: complex) -> DiskAutomorphism:
    """g(z) = (z - p)/(1 - conj(p) z) with g'(z0)/g(z0) = -conj(z0)/(1 - |z0|^2).

    The rotation factor is free and set to 1.
    """
    ps = extremal_parameters(z0)
    if not ps:
        raise ConvergenceError(f"no extremal parameter inside the disk for z0 = {z0!r}")
    return DiskAutomorphism(1.0, -ps[0])


def extremal_map(z0: complex, scale: float = 1.0) -> ConstrainedSelfMap:
    g = construct_extremal_automorphism(z0)
    return ConstrainedSelfMap(complex(z0), BlaschkeProduct([(g.zero, g.rotation)]), scale)


def _random_blaschke(rng: np.random.Generator, degree: int) -> BlaschkeProduct:
    factors = []
    for _ in range(degree):
        r = math.sqrt(rng.uniform(0, 0.95**2))
        a = r * np.exp(1j * rng.uniform(0, 2 * np.pi))
        factors.append((complex(a), complex(np.exp(1j * rng.uniform(0, 2 * np.pi)))))
    return BlaschkeProduct(factors)


def correct_inner_factor(h: MeroFunction, z0: complex, rng: np.random.Generator) -> Optional[RationalFunction]:
    """Post-compose a self-map h with a disk automorphism so the result satisfies the constraint.

    With zeta = h(z0), send zeta to 0 by L, then apply R(y) = lam (y + b)/(1 + conj(b) y).
    The ratio g'(z0)/g(z0) equals (1 - |b|^2) h'(z0) / (b (1 - |zeta|^2)), so b is
    fixed in closed form; lam stays random.  Returns None when h'(z0) = 0.
    """
    (zeta, dh), _ = h.jet(complex(z0), 1)
    zeta, dh = complex(zeta), complex(dh)
    if abs(dh) < 1e-14 or abs(zeta) >= 1:
        return None
    s2 = abs(z0) ** 2
    target = -complex(z0).conjugate() / (1 - s2)
    Q = target * (1 - abs(zeta) ** 2) / dh  # (1 - |b|^2)/b = Q
    beta = 2.0 / (math.sqrt(abs(Q) ** 2 + 4) + abs(Q))
    b = beta * np.exp(-1j * np.angle(Q))
    lam = np.exp(1j * rng.uniform(0, 2 * np.pi))
    L = np.array([[1, -zeta], [-zeta.conjugate(), 1]])
    R = np.array([[lam, lam * b], [np.conj(b), 1]])
    return h.to_rational().post_compose(R @ L)


@dataclass(frozen=True)
class SampleResult:
    kind: str  # "scaled_extremal" or "blaschke"
    degree: int  # degree of the Blaschke product phi * g before scaling
    scale: float
    wprime_abs: float
    wsecond_abs: float


def sample_constrained_maps(z0: complex, count: int, seed: int = 42, max_degree: int = 5) -> List[SampleResult]:
    """Constrained self-maps with their |w'(z0)|.

    Half are scaled extremals t * phi * g (t uniform in (0, 1]); the rest are
    Blaschke products of degree 2..max_degree built by correcting a random
    inner factor, kept only if |w''(z0)| < 1e-8.
    """
    z0 = complex(z0)
    rng = np.random.default_rng(seed)
    g = extremal_map(z0).inner_factor
    out: List[SampleResult] = []
    n_scaled = count // 2
    for _ in range(n_scaled):
        t = 1.0 - rng.uniform(0, 1)  # in (0, 1]
        w = ConstrainedSelfMap(z0, g, t)
        _, w1, w2 = w.derivatives_at_z0()
        out.append(SampleResult("scaled_extremal", 2, t, abs(w1), abs(w2)))
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 20 * count:
            raise ConvergenceError("too many rejected Blaschke samples")
        deg = int(rng.integers(1, max_degree))  # inner degree 1..max_degree-1
        inner = correct_inner_factor(_random_blaschke(rng, deg), z0, rng)
        if inner is None:
            continue
        w = ConstrainedSelfMap(z0, inner, 1.0)
        w0, w1, w2 = w.derivatives_at_z0()
        if abs(w0) > 1e-12 or abs(w2) >= 1e-8:
            continue
        out.append(SampleResult("blaschke", deg + 1, 1.0, abs(w1), abs(w2)))
    return out
