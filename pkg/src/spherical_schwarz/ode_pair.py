"""Writing f = w1/w2 with w'' + (S_f/2) w = 0 and unit Wronskian.

If w1, w2 solve the linear equation and w1' w2 - w1 w2' = 1 then f = w1/w2
has Schwarzian S_f and

    f#(z) = 1 / (|w1(z)|^2 + |w2(z)|^2).

Solutions are integrated along straight segments from a base point with
fixed-step RK4 (step 1e-4 in arc length), vectorized over all targets.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from numpy.polynomial import polynomial as P

from .bounds import asymptotic_factor
from .errors import ConvergenceError, CriticalPointError
from .functions import MeroFunction, schwarzian
from .schwarz_pick import sp_bound, sp_bound_classical
from .sphere import chordal_distance_array

WRONSKIAN_TOL = 1e-8

SchwarzianInput = Union[Sequence[complex], Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class OdeSolutionPair:
    schwarzian_coeffs: Optional[tuple]
    base_point: complex
    targets: np.ndarray
    w1: np.ndarray
    w1p: np.ndarray
    w2: np.ndarray
    w2p: np.ndarray

    def wronskian(self) -> np.ndarray:
        return self.w1p * self.w2 - self.w1 * self.w2p

    def f_values(self) -> np.ndarray:
        return self.w1 / self.w2

    def fsharp_pair(self) -> np.ndarray:
        return 1.0 / (np.abs(self.w1) ** 2 + np.abs(self.w2) ** 2)

    def fsharp_direct(self) -> np.ndarray:
        """|f'|/(1 + |f|^2) with f' = (w1' w2 - w1 w2')/w2^2 from the quotient rule."""
        f = self.w1 / self.w2
        fp = (self.w1p * self.w2 - self.w1 * self.w2p) / self.w2**2
        return np.abs(fp) / (1.0 + np.abs(f) ** 2)

    def index_of(self, z: complex) -> int:
        hits = np.flatnonzero(np.abs(self.targets - z) <= 1e-14 * max(1.0, abs(z)))
        if hits.size == 0:
            raise ValueError(f"{z!r} is not an integrated target")
        return int(hits[0])

    def write_csv(self, fh) -> None:
        writer = csv.writer(fh)
        writer.writerow(["z_re", "z_im", "w1_re", "w1_im", "w2_re", "w2_im", "wronskian_residual", "fsharp_pair", "fsharp_direct"])
        res = np.abs(self.wronskian() - 1.0)
        for row in zip(self.targets, self.w1, self.w2, res, self.fsharp_pair(), self.fsharp_direct()):
            z, a, b, r, fp, fd = row
            writer.writerow([repr(float(v)) for v in (z.real, z.imag, a.real, a.imag, b.real, b.imag, r, fp, fd)])


def _as_callable(S: SchwarzianInput):
    if callable(S):
        return S, None
    coeffs = tuple(complex(c) for c in S)
    arr = np.asarray(coeffs, dtype=complex)
    return (lambda z: P.polyval(z, arr)), coeffs


def integrate_pair(
    S: SchwarzianInput,
    z_targets,
    base_point: complex = 0j,
    initial=((0, 1), (1, 0)),
    step: float = 1e-4,
    max_radius: Optional[float] = 0.9,
) -> OdeSolutionPair:
    """Integrate two solutions of w'' + (S/2) w = 0 from ``base_point`` to each target.

    ``initial`` gives (w1, w1') and (w2, w2') at the base point; the default
    pair has unit Wronskian.  S is either ascending polynomial coefficients or
    a vectorized callable holomorphic on a disk containing all segments.
    """
    fS, coeffs = _as_callable(S)
    targets = np.atleast_1d(np.asarray(z_targets, dtype=complex))
    if max_radius is not None and np.any(np.abs(targets) > max_radius + 1e-12):
        raise ValueError(f"targets must satisfy |z| <= {max_radius}")
    base = complex(base_point)
    delta = targets - base
    length = float(np.max(np.abs(delta))) if targets.size else 0.0
    n = max(1, math.ceil(length / step))
    h = 1.0 / n
    (a0, a1), (b0, b1) = initial
    y = np.empty((4, targets.size), dtype=complex)
    y[0], y[1], y[2], y[3] = a0, a1, b0, b1

    def rhs(tau, y):
        half_s = 0.5 * fS(base + tau * delta)
        return np.stack([delta * y[1], -delta * half_s * y[0], delta * y[3], -delta * half_s * y[2]])

    for i in range(n):
        t = i * h
        k1 = rhs(t, y)
        k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(t + h, y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)

    pair = OdeSolutionPair(coeffs, base, targets, y[0], y[1], y[2], y[3])
    w0 = a1 * b0 - a0 * b1
    drift = float(np.max(np.abs(pair.wronskian() - w0))) if targets.size else 0.0
    if drift > WRONSKIAN_TOL:
        raise ConvergenceError(f"Wronskian drift {drift:.3e} exceeds {WRONSKIAN_TOL:g}")
    return pair


def spherical_via_pair(pair: OdeSolutionPair, z: complex) -> float:
    i = pair.index_of(complex(z))
    return float(1.0 / (abs(pair.w1[i]) ** 2 + abs(pair.w2[i]) ** 2))


@dataclass(frozen=True)
class Thm3Report:
    z0: complex
    c: float
    fsharp_direct: float
    fsharp_pair: float  # |w1'(z0)|^2
    bound: float
    holds: bool
    max_w_modulus: float  # max of sqrt(c) |w1| over the samples
    wsecond_ode: float  # |S_f(z0)/2 * w(z0)|
    wsecond_fd: float  # finite-difference |w''(z0)|
    lemma_value: float  # |w'(z0)| = sqrt(c) |w1'(z0)|
    lemma_bound: float
    decomposition_error: float  # max chordal distance between w1/w2 and f


def thm3_pipeline(
    f: MeroFunction,
    z0: complex,
    c: float,
    sample_radius: float = 0.95,
    radial_count: int = 8,
    angular_count: int = 32,
    step: float = 1e-4,
    fd_step: float = 1e-3,
    tol: float = 1e-9,
) -> Thm3Report:
    """Re-derive the refined upper bound at z0 through the ODE decomposition of f.

    f must vanish at z0 and satisfy f# >= c (c is typically a grid estimate).
    With w1(z0) = 0, w1'(z0) = sqrt(f'(z0)), w2 = 1/sqrt(f'(z0)) and
    w2'(z0) = -f''(z0)/(2 f'(z0)^{3/2}) the pair has unit Wronskian and
    w = sqrt(c) w1 maps the disk into the closed disk with w(z0) = w''(z0) = 0.
    Raises ValueError when some |w| exceeds 1 + tol, i.e. c is too large for f.
    """
    z0 = complex(z0)
    (g, g1, g2), recip = f.jet(z0, 2)
    if bool(recip) or abs(complex(g)) > 1e-10:
        raise ValueError(f"f(z0) must vanish, got {complex(g)!r}")
    f1, f2 = complex(g1), complex(g2)
    if abs(f1) < 1e-14:
        raise CriticalPointError(f"f'(z0) = 0 at z0 = {z0!r}")
    r1 = f1**0.5
    initial = ((0, r1), (1 / r1, -f2 / (2 * f1 * r1)))

    radii = np.linspace(0, sample_radius, radial_count + 1)[1:]
    ring = np.exp(2j * np.pi * np.arange(angular_count) / angular_count)
    samples = np.concatenate([[0j], np.outer(radii, ring).ravel()])
    fd = z0 + fd_step * np.array([1, -1, 1j, -1j])
    targets = np.concatenate([[z0], fd, samples])
    pair = integrate_pair(lambda z: schwarzian(f, z), targets, base_point=z0, initial=initial, step=step, max_radius=None)

    sqc = math.sqrt(c)
    wmax = float(sqc * np.max(np.abs(pair.w1[5:])))
    if wmax > 1 + tol:
        raise ValueError(f"sqrt(c) |w1| reaches {wmax:.6f} > 1: level c = {c} exceeds inf f#")
    w = sqc * pair.w1
    lap = (w[1] + w[2] - 2 * w[0]) / fd_step**2
    # along the imaginary direction the second difference gives -w''
    lap_i = -(w[3] + w[4] - 2 * w[0]) / fd_step**2
    wsecond_fd = float(abs(0.5 * (lap + lap_i)))
    wsecond_ode = float(abs(0.5 * complex(schwarzian(f, z0)) * w[0]))

    s = abs(z0)
    bound = asymptotic_factor(s) / (c * (1 - s * s) ** 2)
    fs_pair = float(abs(pair.w1p[0]) ** 2)
    fs_direct = float(f.fsharp(z0))
    lemma_value = sqc * float(abs(pair.w1p[0]))
    lemma_bound = sp_bound(s) if s > 0 else sp_bound_classical(0.0)
    decomp = float(np.max(chordal_distance_array(pair.f_values()[5:], f.values(samples))))
    return Thm3Report(
        z0, c, fs_direct, fs_pair, bound, fs_direct <= bound * (1 + 1e-12), wmax,
        wsecond_ode, wsecond_fd, lemma_value, lemma_bound, decomp,
    )
