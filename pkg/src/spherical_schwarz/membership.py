"""Sampled membership in F_c and G_c, extremal functions, and the g_n example."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .bounds import _check_level, origin_lower, origin_upper
from .functions import MeroFunction, RationalFunction, RigidScaled, probe_local_univalence
from .grids import DEFAULT_GRID, GridSpec
from .sphere import RigidMotion

PLUS, MINUS = "plus", "minus"


@dataclass(frozen=True)
class MembershipReport:
    c_interior_estimate: float
    c_boundary_estimate: float
    boundary_sequence: Tuple[Tuple[float, float], ...]  # (radius, min f# on that circle)
    locally_univalent: bool
    in_Fc_at_level: Optional[float]
    in_Gc_at_level: Optional[float]
    fsharp_at_origin: float


def probe_membership(f: MeroFunction, grid: GridSpec = DEFAULT_GRID) -> MembershipReport:
    """Estimate inf f# over the disk and its boundary liminf by sampling.

    For a locally univalent f the level at which it lies in F_c is the
    interior minimum; otherwise only G_c membership (boundary behaviour) is
    reported.
    """
    interior = float(np.min(f.fsharp(grid.points())))
    seq = tuple((r, float(np.min(f.fsharp(grid.circle(r))))) for r in grid.refinement_radii)
    boundary = seq[-1][1] if seq else interior
    lu = probe_local_univalence(f, grid).is_locally_univalent
    return MembershipReport(
        c_interior_estimate=interior,
        c_boundary_estimate=boundary,
        boundary_sequence=seq,
        locally_univalent=lu,
        in_Fc_at_level=interior if lu and interior > 0 else None,
        in_Gc_at_level=boundary if boundary > 0 else None,
        fsharp_at_origin=float(f.fsharp(0j)),
    )


def extremal_modulus(c: float, branch: str) -> float:
    """|eta| = (1 +- sqrt(1 - 4c^2))/(2c) for the plus/minus branch."""
    if branch == PLUS:
        return origin_upper(c)
    if branch == MINUS:
        return origin_lower(c)
    raise ValueError(f"branch must be 'plus' or 'minus', got {branch!r}")


@dataclass(frozen=True)
class ExtremalSpec:
    c: float
    branch: str = PLUS
    motion: RigidMotion = field(default_factory=RigidMotion.identity)
    eta_phase: float = 0.0

    @property
    def eta(self) -> complex:
        return extremal_modulus(self.c, self.branch) * complex(math.cos(self.eta_phase), math.sin(self.eta_phase))


def make_extremal(spec: ExtremalSpec) -> RigidScaled:
    return RigidScaled(spec.motion, spec.eta)


@dataclass(frozen=True)
class SharpnessReport:
    c: float
    branch: str
    bound: float
    attained: float
    equality_error: float
    members_checked: int
    closest_member_value: Optional[float]
    strict: bool

    @property
    def ok(self) -> bool:
        return self.equality_error < 1e-10 and self.strict


def verify_sharpness(c: float, branch: str = PLUS, count: int = 200, seed: int = 42) -> SharpnessReport:
    """Check equality for the extremal and strict inequality for non-extremal members.

    The members are extremals at levels c' in (c, 1/2], composed with random
    rigid motions; their spherical derivative has infimum c' > c, so they lie
    in F_c without being extremal for c.
    """
    _check_level(c)
    rng = np.random.default_rng(seed)
    f = make_extremal(ExtremalSpec(c, branch, RigidMotion.random(rng), rng.uniform(0, 2 * math.pi)))
    bound = extremal_modulus(c, branch)
    attained = float(f.fsharp(0j))
    values = []
    if c < 0.5:
        for _ in range(count):
            cp = rng.uniform(c, 0.5)
            if cp <= c:
                continue
            g = make_extremal(ExtremalSpec(cp, rng.choice([PLUS, MINUS]), RigidMotion.random(rng)))
            values.append(float(g.fsharp(0j)))
    lo, hi = origin_lower(c), origin_upper(c)
    strict = all(lo < v < hi for v in values)
    if values:
        closest = max(values) if branch == PLUS else min(values)
    else:
        closest = None
    return SharpnessReport(c, branch, bound, attained, abs(attained - bound), len(values), closest, strict)


# ---------------------------------------------------------------------------
# the non-normal family g_n(z) = z/(1/n^2 + z^2)


def gn_function(n: int) -> RationalFunction:
    if n < 2:
        raise ValueError("n must be at least 2")
    return RationalFunction([0, 1], [1.0 / n**2, 0, 1])


def gn_boundary_estimate(n: int) -> float:
    """(1 - 1/n^2)/(2 + 2/n^2 + 1/n^4): a lower bound for g_n# on |z| = 1.

    It is not a lower bound on the whole disk, since g_n# vanishes at +-1/n.
    """
    a = 1.0 / n**2
    return (1.0 - a) / (2.0 + 2.0 * a + a * a)


def gn_fsharp(n: int, z):
    """Closed form |1/n^2 - z^2| / (|1/n^2 + z^2|^2 + |z|^2)."""
    a = 1.0 / n**2
    z = np.asarray(z, dtype=complex)
    return np.abs(a - z**2) / (np.abs(a + z**2) ** 2 + np.abs(z) ** 2)


@dataclass(frozen=True)
class NonNormalityReport:
    n: int
    fsharp_at_origin: float
    boundary_estimate: float
    boundary_minimum: float
    boundary_radius: float
    annulus: Tuple[Tuple[float, float, float], ...]  # (radius, max |z g_n(z) - 1|, a/(r^2 - a))

    @property
    def annulus_max_deviation(self) -> float:
        return max(row[1] for row in self.annulus)


def gn_counterexample(
    n: int,
    boundary_radius: float = 1 - 1e-6,
    radii: Tuple[float, ...] = (0.5, 0.6, 0.7, 0.8, 0.9),
    angular_count: int = 720,
) -> Tuple[RationalFunction, NonNormalityReport]:
    """Evidence that G_c is not normal: g_n#(0) = n^2 while z g_n(z) -> 1 off the origin."""
    g = gn_function(n)
    theta = 2 * np.pi * np.arange(angular_count) / angular_count
    bmin = float(np.min(g.fsharp(boundary_radius * np.exp(1j * theta))))
    a = 1.0 / n**2
    rows = []
    for r in radii:
        z = r * np.exp(1j * theta)
        with np.errstate(invalid="ignore"):
            d = np.abs(z * g.values(z) - 1.0)
        dev = float(np.max(np.where(np.isfinite(d), d, np.inf)))
        rows.append((r, dev, a / (r * r - a) if r * r > a else math.inf))
    report = NonNormalityReport(
        n=n,
        fsharp_at_origin=float(g.fsharp(0j)),
        boundary_estimate=gn_boundary_estimate(n),
        boundary_minimum=bmin,
        boundary_radius=boundary_radius,
        annulus=tuple(rows),
    )
    return g, report
