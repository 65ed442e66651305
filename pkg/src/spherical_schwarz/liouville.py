"""The boundary value problem  Delta u = -4 c^2 e^{2u} in the disk, u = 0 on the circle.

For u = log f# - log c with f(z) = T(eta z) the problem is solved exactly.
Radial solutions u(z) = v(|z|) reduce, through x = log r and
w(x) = v(e^x) + x + log(2c), to

    w'' = -e^{2w} on (-inf, 0],   w(0) = log(2c),

with first integral w'^2 + e^{2w} = 1.  Shooting from x = 0 with the two
admissible slopes +-sqrt(1 - 4c^2) recovers both solutions; the condition
w' -> 1 at -inf becomes a check instead of a boundary condition.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ConvergenceError, InfeasibleLevelError
from .functions import MeroFunction, RigidScaled
from .sphere import RigidMotion, chordal_distance_array, compose_rigid

FIRST_INTEGRAL_TOL = 1e-8


@dataclass(frozen=True)
class BvpProblem:
    c: float

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError(f"c must be positive, got {self.c!r}")

    @property
    def discriminant(self) -> float:
        return 1.0 - 4.0 * self.c**2


@dataclass(frozen=True)
class ClosedFormSolution:
    """u(z) = log(|eta|/(1 + |eta|^2 |z|^2)) - log c."""

    eta_modulus: float
    c: float

    def u(self, z):
        eta = self.eta_modulus
        return np.log(eta / (1.0 + eta**2 * np.abs(z) ** 2)) - math.log(self.c)

    def v(self, r):
        return self.u(np.asarray(r, dtype=float))

    def w(self, x):
        """Transformed radial profile: w(x) = -log cosh(x + log|eta|)."""
        t = np.asarray(x, dtype=float) + math.log(self.eta_modulus)
        # log cosh t = |t| + log1p(e^{-2|t|}) - log 2
        return -(np.abs(t) + np.log1p(np.exp(-2 * np.abs(t))) - math.log(2.0))

    def wprime(self, x):
        return -np.tanh(np.asarray(x, dtype=float) + math.log(self.eta_modulus))

    def pde_residual(self, z: complex, h: float) -> float:
        """Five-point Laplacian of u plus 4 c^2 e^{2u} at z."""
        pts = np.array([z, z + h, z - h, z + 1j * h, z - 1j * h])
        u = self.u(pts)
        lap = (u[1] + u[2] + u[3] + u[4] - 4 * u[0]) / h**2
        return float(lap + 4 * self.c**2 * math.exp(2 * u[0]))

    def function(self) -> RigidScaled:
        return RigidScaled(RigidMotion.identity(), self.eta_modulus)


def closed_form_solutions(c: float) -> List[ClosedFormSolution]:
    """Two solutions for c < 1/2, one for c = 1/2, none beyond."""
    disc = BvpProblem(c).discriminant
    if disc < 0:
        return []
    if disc == 0:
        return [ClosedFormSolution(1.0, c)]
    root = math.sqrt(disc)
    # larger modulus first; smaller one in cancellation-free form
    return [ClosedFormSolution((1 + root) / (2 * c), c), ClosedFormSolution(2 * c / (1 + root), c)]


@dataclass(frozen=True)
class BvpTrajectory:
    c: float
    branch: str  # "plus", "minus" or "double"
    x: np.ndarray
    w: np.ndarray
    wprime: np.ndarray
    method: str
    eta_fit: Optional[float] = None

    @property
    def residual(self) -> np.ndarray:
        """|w'^2 + e^{2w} - 1| at every sample."""
        return np.abs(self.wprime**2 + np.exp(2 * self.w) - 1.0)

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residual))

    @property
    def initial_value(self) -> float:
        return float(self.w[0])

    @property
    def asymptotic_slope(self) -> float:
        return float(self.wprime[-1])

    def interior_zeros(self, tol: float = 1e-8) -> List[float]:
        """Points x < 0 where w changes sign or touches 0 with w' = 0."""
        out = []
        w = self.w
        for i in range(1, len(w) - 1):
            if w[i] >= -tol and w[i] >= w[i - 1] and w[i] >= w[i + 1]:
                out.append(float(self.x[i]))
        return out

    def rows(self, stride: int = 1):
        r = self.residual
        for i in range(0, len(self.x), stride):
            yield (float(self.x[i]), float(self.w[i]), float(self.wprime[i]), float(r[i]))


def _rk4(w0: float, s0: float, x_end: float, h: float):
    """Classical RK4 for w'' = -e^{2w}, stepping from 0 down to x_end < 0."""
    n = int(round(abs(x_end) / h))
    dx = x_end / n
    xs = [0.0] * (n + 1)
    ws = [0.0] * (n + 1)
    vs = [0.0] * (n + 1)
    w, v = w0, s0
    ws[0], vs[0] = w, v
    exp = math.exp
    half = 0.5 * dx
    sixth = dx / 6.0
    for i in range(1, n + 1):
        k1v = -exp(2 * w)
        k2w = v + half * k1v
        k2v = -exp(2 * (w + half * v))
        k3w = v + half * k2v
        k3v = -exp(2 * (w + half * k2w))
        k4w = v + dx * k3v
        k4v = -exp(2 * (w + dx * k3w))
        w += sixth * (v + 2 * k2w + 2 * k3w + k4w)
        v += sixth * (k1v + 2 * k2v + 2 * k3v + k4v)
        xs[i] = i * dx
        ws[i] = w
        vs[i] = v
    return np.array(xs), np.array(ws), np.array(vs)


def _adaptive(w0: float, s0: float, xs: np.ndarray):
    sol = solve_ivp(
        lambda x, y: [y[1], -math.exp(2 * y[0])],
        (0.0, float(xs[-1])),
        [w0, s0],
        method="DOP853",
        t_eval=xs,
        rtol=1e-13,
        atol=1e-14,
    )
    if not sol.success:
        raise ConvergenceError(f"adaptive integration failed: {sol.message}")
    return sol.y[0], sol.y[1]


def integrate_radial(w0: float, s0: float, x_max: float = 20.0, step: float = 1e-4):
    """Integrate w'' = -e^{2w} backward from (w0, s0) at x = 0 to x = -x_max.

    Uses fixed-step RK4; falls back to an adaptive Dormand-Prince run when the
    first integral drifts by more than FIRST_INTEGRAL_TOL.
    """
    xs, ws, vs = _rk4(w0, s0, -x_max, step)
    energy = s0**2 + math.exp(2 * w0)
    drift = np.max(np.abs(vs**2 + np.exp(2 * ws) - energy))
    method = "rk4"
    if drift > FIRST_INTEGRAL_TOL:
        ws, vs = _adaptive(w0, s0, xs)
        method = "dop853"
        drift = np.max(np.abs(vs**2 + np.exp(2 * ws) - energy))
        if drift > FIRST_INTEGRAL_TOL:
            raise ConvergenceError(f"first integral drift {drift:.3e} exceeds {FIRST_INTEGRAL_TOL:g}")
    return xs, ws, vs, method


def initial_slope(c: float, branch: str) -> Tuple[float, str]:
    disc = BvpProblem(c).discriminant
    if disc < 0:
        raise InfeasibleLevelError(
            f"c = {c!r} > 1/2: the initial slope would need w'(0)^2 = 1 - 4c^2 < 0, "
            "so there is no locally univalent solution"
        )
    if disc == 0:
        return 0.0, "double"
    if branch not in ("plus", "minus"):
        raise ValueError(f"branch must be 'plus' or 'minus', got {branch!r}")
    root = math.sqrt(disc)
    return (root if branch == "plus" else -root), branch


def shoot(problem: BvpProblem, branch: str = "plus", x_max: float = 20.0, step: float = 1e-4) -> BvpTrajectory:
    """Integrate one radial branch and check its behaviour at -infinity.

    The plus slope gives the solution with |eta| < 1, the minus slope the one
    with |eta| > 1 (w'(0) = -tanh(log|eta|)).
    """
    c = problem.c
    s0, branch = initial_slope(c, branch)
    xs, ws, vs, method = integrate_radial(math.log(2 * c), s0, x_max, step)
    # w(x) ~ x + log(2|eta|) as x -> -inf
    eta_fit = math.exp(ws[-1] - xs[-1] - math.log(2.0))
    traj = BvpTrajectory(c, branch, xs, ws, vs, method, eta_fit)
    if abs(traj.asymptotic_slope - 1.0) > 1e-6:
        raise ConvergenceError(f"w' at x = {xs[-1]} is {traj.asymptotic_slope!r}, expected -> 1")
    return traj


@dataclass(frozen=True)
class SolutionCount:
    c: float
    count: int
    label: str
    discriminant: float
    cross_validated: bool
    trajectories: Tuple[BvpTrajectory, ...] = ()
    notes: str = ""


_LABELS = {0: "zero", 1: "one", 2: "two"}


def count_solutions(c: float, cross_validate: bool = True, x_max: float = 20.0, step: float = 1e-4) -> SolutionCount:
    """Number of locally univalent solutions, from the sign of 1 - 4c^2.

    Shooting is the independent check: each admissible slope must produce a
    trajectory that conserves the first integral, stays <= 0 and has w' -> 1;
    for c > 1/2 every real slope gives w'^2 + e^{2w} = 4c^2 + s^2 > 1, so the
    asymptotic slope cannot be 1.
    """
    disc = BvpProblem(c).discriminant
    n = 2 if disc > 0 else (1 if disc == 0 else 0)
    if not cross_validate:
        return SolutionCount(c, n, _LABELS[n], disc, False)
    trajs: List[BvpTrajectory] = []
    if n == 0:
        xs, ws, vs, _ = integrate_radial(math.log(2 * c), 0.0, x_max, step)
        slope = float(vs[-1])
        ok = abs(slope - 1.0) > 1e-3
        note = f"best-case slope 0 gives asymptotic slope {slope:.6f} != 1"
        return SolutionCount(c, n, _LABELS[n], disc, ok, (), note)
    branches = ["double"] if n == 1 else ["plus", "minus"]
    for br in branches:
        trajs.append(shoot(BvpProblem(c), br, x_max, step))
    ok = all(t.max_residual <= FIRST_INTEGRAL_TOL and np.all(t.w <= 1e-12) for t in trajs)
    fits = sorted(t.eta_fit for t in trajs)
    expected = sorted(s.eta_modulus for s in closed_form_solutions(c))
    ok = ok and len(fits) == len(expected) and np.allclose(fits, expected, rtol=1e-6)
    if n == 2:
        ok = ok and abs(fits[0] - fits[1]) > 1e-6
    return SolutionCount(c, n, _LABELS[n], disc, bool(ok), tuple(trajs))


# ---------------------------------------------------------------------------
# rigidity


@dataclass(frozen=True)
class RigidityReport:
    oscillation: float
    boundary_level: float
    rigid_candidate: bool
    fitted: Optional[RigidScaled]
    residual: Optional[float]
    contradiction: bool


def fit_rigid_scaled(f: MeroFunction) -> RigidScaled:
    """The unique (up to rotation) T(eta z) matching f(0) and f'(0)."""
    (g, g1), recip = f.jet(0j, 1)
    w0, d0 = complex(g), complex(g1)
    a = 1.0 / math.sqrt(1.0 + abs(w0) ** 2)
    fit = RigidScaled(RigidMotion(a, w0 * a), d0 * a * a)
    if bool(recip):
        inv = RigidMotion(0, 1j)  # w -> 1/w
        fit = RigidScaled(compose_rigid(inv, fit.motion), fit.eta)
    return fit


def verify_rigidity(
    f: MeroFunction,
    tol: float = 1e-6,
    radius: float = 1 - 1e-4,
    angular_count: int = 1024,
    residual_tol: float = 1e-6,
) -> RigidityReport:
    """Near-constant boundary spherical derivative should force f = T(eta z).

    Small oscillation of f# on |z| = radius triggers a fit of T(eta z) to f(0),
    f'(0); a large chordal residual of that fit would contradict rigidity.
    """
    theta = 2 * np.pi * np.arange(angular_count) / angular_count
    fs = f.fsharp(radius * np.exp(1j * theta))
    osc = float(np.max(fs) - np.min(fs))
    level = float(np.mean(fs))
    if osc >= tol:
        return RigidityReport(osc, level, False, None, None, False)
    fit = fit_rigid_scaled(f)
    rr = np.linspace(0, 0.99, 50)
    pts = np.outer(rr, np.exp(1j * np.linspace(0, 2 * np.pi, 128, endpoint=False))).ravel()
    residual = float(np.max(chordal_distance_array(f.values(pts), fit.values(pts))))
    return RigidityReport(osc, level, True, fit, residual, residual > residual_tol)
