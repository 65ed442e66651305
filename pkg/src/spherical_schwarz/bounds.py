"""Closed-form bounds for the spherical derivative of functions in F_c.

F_c is the class of locally univalent meromorphic f on the unit disk with
f#(z) >= c everywhere.  All quantities below are explicit formulas in the
level c and the modulus s = |z0| of the evaluation point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import InfeasibleLevelError

MAX_LEVEL = 0.5


def _check_level(c: float) -> None:
    if not c > 0:
        raise ValueError(f"level c must be positive, got {c!r}")
    if c > MAX_LEVEL:
        raise InfeasibleLevelError(
            f"infeasible level c = {c!r} > 1/2: no locally univalent meromorphic function "
            "on the disk has spherical derivative >= c everywhere, so F_c is empty"
        )


def _check_modulus(s: float) -> None:
    if not 0.0 <= s < 1.0:
        raise ValueError(f"|z0| must lie in [0, 1), got {s!r}")


def _quadratic_roots(c: float, d: float):
    """Roots of c d x^2 - x + c, the lower one in cancellation-free form."""
    disc = 1.0 - 4.0 * c * c * d
    if disc < 0:
        raise InfeasibleLevelError(f"negative discriminant 1 - 4c^2(1-s^2)^2 = {disc!r}")
    root = math.sqrt(disc)
    return 2.0 * c / (1.0 + root), (1.0 + root) / (2.0 * c * d)


def origin_upper(c: float) -> float:
    """Sharp upper bound (1 + sqrt(1 - 4c^2))/(2c) for f#(0)."""
    _check_level(c)
    return _quadratic_roots(c, 1.0)[1]


def origin_lower(c: float) -> float:
    """Sharp lower bound (1 - sqrt(1 - 4c^2))/(2c) for f#(0), as 2c/(1 + sqrt(1 - 4c^2))."""
    _check_level(c)
    return _quadratic_roots(c, 1.0)[0]


def asymptotic_factor(s: float) -> float:
    """((sqrt(4 + s^2) - s)/2)^2, evaluated as (2/(sqrt(4 + s^2) + s))^2.

    Decreases from 1 at s = 0 to (3 - sqrt 5)/2 at s = 1.
    """
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"s must lie in [0, 1], got {s!r}")
    return (2.0 / (math.sqrt(4.0 + s * s) + s)) ** 2


@dataclass(frozen=True)
class BoundQuery:
    c: float
    s: float

    @property
    def feasible(self) -> bool:
        return 0 < self.c <= MAX_LEVEL


@dataclass(frozen=True)
class BoundReport:
    c: float
    s: float
    lower_thm2: float
    upper_thm2: float
    upper_thm3: float
    upper_steinmetz: float
    upper_envelope: float
    active_upper: str  # "thm2" or "thm3"

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def pointwise_bounds(q: BoundQuery) -> BoundReport:
    """Two-sided bound at |z0| = s, the refined upper bound and the classical one."""
    c, s = q.c, q.s
    _check_level(c)
    _check_modulus(s)
    d = (1.0 - s * s) ** 2
    lower, upper2 = _quadratic_roots(c, d)
    steinmetz = 1.0 / (c * d)
    upper3 = asymptotic_factor(s) * steinmetz
    active = "thm2" if upper2 <= upper3 else "thm3"
    return BoundReport(c, s, lower, upper2, upper3, steinmetz, min(upper2, upper3), active)


def envelope_crossing(c: float, lo: float = 0.0, hi: float = 0.5) -> float:
    """Modulus s* in (lo, hi) where the two upper bounds cross, by bracketing.

    Raises ValueError when there is no sign change on the bracket.
    """
    def gap(s):
        r = pointwise_bounds(BoundQuery(c, s))
        return r.upper_thm2 - r.upper_thm3

    glo, ghi = gap(lo), gap(hi)
    if np.sign(glo) == np.sign(ghi):
        raise ValueError(f"no crossing of the upper bounds on [{lo}, {hi}] for c = {c}")
    return brentq(gap, lo, hi, xtol=1e-14)


def length_preserving_level(rho: float):
    """Level c(rho) = rho/(1 - rho^2) and whether it is admissible (c <= 1/2).

    A locally univalent f with f(0) = 0 that is length preserving on |z| = rho,
    from the hyperbolic to the spherical metric, rescales to a function whose
    boundary spherical derivative is identically c(rho).
    """
    if not 0.0 < rho < 1.0:
        raise ValueError(f"radius must lie in (0, 1), got {rho!r}")
    c = rho / (1.0 - rho * rho)
    return c, c <= MAX_LEVEL + 1e-12


def feasible_radius_bound() -> float:
    return math.sqrt(2.0) - 1.0
