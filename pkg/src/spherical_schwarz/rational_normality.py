"""Sup-norm bound for rational functions in F_c with prescribed poles outside the disk.

For poles z_1..z_n with |z_j| > 1 a Bernstein-type inequality for rationals
gives |f'(z)| <= K(z) ||f|| on the unit circle, where

    K(z) = sum (|z_j|^2 - 1)/|z_j - z|^2 <= sum (|z_j| + 1)/(|z_j| - 1) = k_n.

Combined with f# >= c at the boundary maximum this caps ||f||.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize_scalar

from .bounds import MAX_LEVEL
from .errors import InfeasibleLevelError
from .functions import MeroFunction, RationalFunction
from .grids import DEFAULT_GRID, GridSpec
from .membership import probe_membership

UNIT_TOL = 1e-12
THREADS_ENV = "SPHERICAL_SCHWARZ_THREADS"
DEFAULT_POLES = (2.0, 3.0, 1 + 1.5j)


@dataclass(frozen=True)
class PolePrescription:
    poles: Tuple[complex, ...]

    def __post_init__(self):
        poles = tuple(complex(p) for p in self.poles)
        if not poles:
            raise ValueError("at least one pole is required")
        bad = [p for p in poles if not abs(p) > 1]
        if bad:
            raise ValueError(f"poles must satisfy |z_j| > 1, got {bad}")
        object.__setattr__(self, "poles", poles)

    @property
    def degree(self) -> int:
        return len(self.poles)

    def denominator(self) -> np.ndarray:
        """Ascending coefficients of prod (z - z_j)."""
        return np.polynomial.polynomial.polyfromroots(self.poles).astype(complex)


def bernstein_factor(p: PolePrescription, z) -> np.ndarray:
    """K(z) = sum (|z_j|^2 - 1)/|z_j - z|^2 on the unit circle."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(np.abs(z) - 1.0) > UNIT_TOL):
        raise ValueError("the Bernstein factor is defined for |z| = 1 only")
    poles = np.asarray(p.poles)
    out = np.sum((np.abs(poles) ** 2 - 1) / np.abs(poles - z[..., None]) ** 2, axis=-1)
    return out if out.ndim else float(out)


def kn(p: PolePrescription) -> float:
    return float(sum((abs(q) + 1) / (abs(q) - 1) for q in p.poles))


def norm_bound(p: PolePrescription, c: float) -> float:
    """(k/(2c)) (1 + sqrt(1 - 4c^2/k^2)), valid for 0 < c <= k/2."""
    k = kn(p)
    if not c > 0:
        raise ValueError(f"level c must be positive, got {c!r}")
    if c > k / 2:
        raise InfeasibleLevelError(f"c = {c!r} exceeds k_n/2 = {k / 2!r}: no rational f with these poles has f# >= c")
    return k / (2 * c) * (1 + math.sqrt(max(0.0, 1 - 4 * c * c / (k * k))))


def sup_norm(f: MeroFunction, samples: int = 4096) -> Tuple[float, float]:
    """max |f| on the unit circle and its angle: sampling plus golden-section refinement."""
    theta = 2 * np.pi * np.arange(samples) / samples
    mod = np.abs(f.values(np.exp(1j * theta)))
    i = int(np.argmax(mod))
    width = 2 * np.pi / samples
    res = minimize_scalar(
        lambda t: -float(np.abs(f.values(np.exp(1j * t)))),
        bracket=(theta[i] - width, theta[i], theta[i] + width),
        method="golden",
        tol=1e-10,
    )
    if -res.fun >= mod[i]:
        return float(-res.fun), float(res.x % (2 * np.pi))
    return float(mod[i]), float(theta[i])


@dataclass(frozen=True)
class RationalRow:
    poles: Tuple[complex, ...]
    numerator: Tuple[complex, ...]
    k_n: float
    c_f: float
    norm: float
    bound: float

    @property
    def margin(self) -> float:
        return self.bound - self.norm

    @property
    def holds(self) -> bool:
        return self.norm <= self.bound * (1 + 1e-6)


def evaluate_rational(p: PolePrescription, numerator: Sequence[complex], grid: GridSpec = DEFAULT_GRID) -> Optional[RationalRow]:
    """Row for f = numerator / prod(z - z_j), or None unless f is locally univalent with c_f > 0."""
    try:
        f = RationalFunction(list(numerator), p.denominator())
    except ValueError:
        return None  # a prescribed pole cancelled
    if f.degree == 0 or len(f.poles()) != p.degree:
        return None
    rep = probe_membership(f, grid)
    if rep.in_Fc_at_level is None:
        return None
    c_f = min(rep.in_Fc_at_level, MAX_LEVEL)
    norm, _ = sup_norm(f)
    return RationalRow(p.poles, tuple(complex(a) for a in numerator), kn(p), c_f, norm, norm_bound(p, c_f))


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def random_numerator(rng: np.random.Generator, max_degree: int = 3) -> List[complex]:
    deg = int(rng.integers(1, max_degree + 1))
    coeffs = rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1)
    return [complex(a) for a in coeffs]


def rational_campaign(
    p: PolePrescription,
    count: int,
    seed: int = 42,
    max_degree: int = 3,
    grid: GridSpec = DEFAULT_GRID,
    max_batches: int = 200,
) -> List[RationalRow]:
    """``count`` accepted random rationals with poles ``p``, in deterministic order."""
    rng = np.random.default_rng(seed)
    rows: List[RationalRow] = []
    with ThreadPoolExecutor(max_workers=_threads()) as pool:
        for _ in range(max_batches):
            batch = [random_numerator(rng, max_degree) for _ in range(count)]
            for row in pool.map(lambda num: evaluate_rational(p, num, grid), batch):
                if row is not None and len(rows) < count:
                    rows.append(row)
            if len(rows) >= count:
                return rows
    raise RuntimeError(f"only {len(rows)} of {count} random rationals were admissible")


def write_rows_csv(rows: Sequence[RationalRow], fh) -> None:
    writer = csv.writer(fh)
    writer.writerow(["poles", "k_n", "c_f", "norm", "bound", "margin"])
    for r in rows:
        poles = " ".join(f"{q.real!r}{q.imag:+}j" for q in r.poles)
        writer.writerow([poles, repr(r.k_n), repr(r.c_f), repr(r.norm), repr(r.bound), repr(r.margin)])
