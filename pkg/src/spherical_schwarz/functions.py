"""Meromorphic functions on the unit disk with exact derivative access.

Three representations are supported: rational functions stored by
coefficient lists, rigid-motion composites z -> T(eta z), and finite
Blaschke products.  Derivatives are never taken numerically.  At a point z
the function is expanded in a chart, either f itself or 1/f when z lies
within ``POLE_CHART_RADIUS`` of a pole, and every spherical quantity is
computed from that local Taylor jet.
"""

from __future__ import annotations

import math
import re
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import CriticalPointError
from .grids import DEFAULT_GRID, GridSpec
from .sphere import INFINITY, RigidMotion, SpherePoint

POLE_CHART_RADIUS = 1e-6
POLE_RADIUS = 1e-12
COMMON_ROOT_TOL = 1e-10

_FACT = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0]


def _series_divide(num: Sequence[np.ndarray], den: Sequence[np.ndarray]) -> List[np.ndarray]:
    """Taylor coefficients of num/den given those of num and den (den[0] != 0)."""
    out = []
    for k in range(len(num)):
        acc = num[k]
        for j in range(k):
            acc = acc - out[j] * den[k - j]
        out.append(acc / den[0])
    return out


class MeroFunction(ABC):
    """A meromorphic function on (a neighbourhood of) the closed unit disk."""

    @abstractmethod
    def poles(self) -> np.ndarray:
        """Finite poles, with multiplicity."""

    @abstractmethod
    def _chart_series(self, z: np.ndarray, order: int, recip: np.ndarray) -> List[np.ndarray]:
        """Taylor coefficients c_0..c_order at z of f (or of 1/f where recip)."""

    @abstractmethod
    def to_rational(self) -> "RationalFunction":
        ...

    def pole_distance(self, z: np.ndarray) -> np.ndarray:
        poles = self.poles()
        z = np.asarray(z, dtype=complex)
        if poles.size == 0:
            return np.full(z.shape, np.inf)
        return np.min(np.abs(z[..., None] - poles), axis=-1)

    def jet(self, z, order: int = 2) -> Tuple[List[np.ndarray], np.ndarray]:
        """Derivatives g, g', ..., g^(order) at z, where g = f or g = 1/f.

        Returns the list of derivative arrays and the boolean mask of points
        evaluated in the reciprocal chart.
        """
        z = np.asarray(z, dtype=complex)
        recip = self.pole_distance(z) < POLE_CHART_RADIUS
        coeffs = self._chart_series(z, order, recip)
        return [coeffs[k] * _FACT[k] for k in range(order + 1)], recip

    def values(self, z) -> np.ndarray:
        """f(z) as complex array; poles come back as complex inf."""
        z = np.asarray(z, dtype=complex)
        (g,), recip = self.jet(z, 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(recip, 1.0 / g, g)
        at_pole = self.pole_distance(z) < POLE_RADIUS
        return np.where(at_pole, complex("inf"), out)

    def fsharp(self, z) -> np.ndarray:
        """Spherical derivative |f'|/(1+|f|^2), vectorized."""
        (g, g1), _ = self.jet(z, 1)
        return np.abs(g1) / (1.0 + np.abs(g) ** 2)

    def __call__(self, z):
        return self.values(z)


class RationalFunction(MeroFunction):
    """f = P/Q with coefficient lists in ascending degree."""

    def __init__(self, numerator: Sequence[complex], denominator: Sequence[complex] = (1,), check: bool = True):
        num = np.trim_zeros(np.asarray(numerator, dtype=complex), "b")
        den = np.trim_zeros(np.asarray(denominator, dtype=complex), "b")
        if den.size == 0:
            raise ValueError("denominator is identically zero")
        if num.size == 0:
            num = np.zeros(1, dtype=complex)
            den = np.ones(1, dtype=complex)
        self.numerator = num
        self.denominator = den
        self._num_d = [num]
        self._den_d = [den]
        for _ in range(3):
            self._num_d.append(P.polyder(self._num_d[-1]))
            self._den_d.append(P.polyder(self._den_d[-1]))
        self._poles = _roots(den)
        if check:
            self._check_coprime()

    def _check_coprime(self):
        if self._poles.size == 0 or not np.any(self.numerator):
            return
        zeros = _roots(self.numerator)
        if zeros.size and np.min(np.abs(zeros[:, None] - self._poles[None, :])) < COMMON_ROOT_TOL:
            raise ValueError("numerator and denominator share a root")
        scale = np.max(np.abs(self.numerator))
        for r in self._poles:
            bound = COMMON_ROOT_TOL * scale * max(1.0, abs(r)) ** (self.numerator.size - 1)
            if abs(P.polyval(r, self.numerator)) < bound:
                raise ValueError(f"numerator vanishes at the pole {r!r}")

    def poles(self) -> np.ndarray:
        return self._poles

    def zeros(self) -> np.ndarray:
        return _roots(self.numerator)

    @property
    def degree(self) -> int:
        return max(self.numerator.size, self.denominator.size) - 1

    def _chart_series(self, z, order, recip):
        p = [P.polyval(z, self._num_d[k]) / _FACT[k] for k in range(order + 1)]
        q = [P.polyval(z, self._den_d[k]) / _FACT[k] for k in range(order + 1)]
        top = [np.where(recip, qk, pk) for pk, qk in zip(p, q)]
        bot = [np.where(recip, pk, qk) for pk, qk in zip(p, q)]
        with np.errstate(divide="ignore", invalid="ignore"):
            return _series_divide(top, bot)

    def derivative_numerator(self) -> np.ndarray:
        """P'Q - PQ', the numerator of f'."""
        return P.polysub(
            P.polymul(self._num_d[1], self.denominator),
            P.polymul(self.numerator, self._den_d[1]),
        )

    def to_rational(self) -> "RationalFunction":
        return self

    def __mul__(self, other) -> "RationalFunction":
        if isinstance(other, MeroFunction):
            other = other.to_rational()
            return RationalFunction(
                P.polymul(self.numerator, other.numerator),
                P.polymul(self.denominator, other.denominator),
            )
        return RationalFunction(self.numerator * complex(other), self.denominator, check=False)

    __rmul__ = __mul__

    def post_compose(self, m: np.ndarray) -> "RationalFunction":
        """The function (m00 f + m01)/(m10 f + m11)."""
        num, den = self.numerator, self.denominator
        return RationalFunction(
            P.polyadd(m[0, 0] * num, m[0, 1] * den),
            P.polyadd(m[1, 0] * num, m[1, 1] * den),
        )

    def __repr__(self) -> str:
        return f"RationalFunction({self.numerator.tolist()}, {self.denominator.tolist()})"


def _roots(coeffs: np.ndarray) -> np.ndarray:
    c = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
    if c.size <= 1:
        return np.zeros(0, dtype=complex)
    return np.roots(c[::-1]).astype(complex)


class RigidScaled(MeroFunction):
    """z -> T(eta z) for a rigid motion T.  These are the extremal functions."""

    def __init__(self, motion: RigidMotion, eta: complex):
        self.motion = motion
        self.eta = complex(eta)

    def poles(self) -> np.ndarray:
        a, b, eta = self.motion.a, self.motion.b, self.eta
        if b == 0 or eta == 0:
            return np.zeros(0, dtype=complex)
        return np.array([a.conjugate() / (b.conjugate() * eta)])

    def _chart_series(self, z, order, recip):
        a, b, eta = self.motion.a, self.motion.b, self.eta
        num = a * eta * z + b
        den = -b.conjugate() * eta * z + a.conjugate()
        with np.errstate(divide="ignore", invalid="ignore"):
            # f = num/den, f' = eta/den^2, f'' = 2 conj(b) eta^2/den^3, ...
            direct = [num / den, eta / den**2, b.conjugate() * eta**2 / den**3, b.conjugate() ** 2 * eta**3 / den**4]
            # 1/f = den/num, (1/f)' = -eta/num^2, ...
            inverse = [den / num, -eta / num**2, a * eta**2 / num**3, -(a**2) * eta**3 / num**4]
        return [np.where(recip, inverse[k], direct[k]) for k in range(order + 1)]

    def to_rational(self) -> RationalFunction:
        a, b, eta = self.motion.a, self.motion.b, self.eta
        return RationalFunction([b, a * eta], [a.conjugate(), -b.conjugate() * eta], check=False)

    def __repr__(self) -> str:
        return f"RigidScaled(a={self.motion.a!r}, b={self.motion.b!r}, eta={self.eta!r})"


class BlaschkeProduct(MeroFunction):
    """Product of factors rotation * (z - a)/(1 - conj(a) z), |a| < 1."""

    def __init__(self, factors: Sequence[Tuple[complex, complex]]):
        fs = []
        for a, rot in factors:
            a, rot = complex(a), complex(rot)
            if not abs(a) < 1.0:
                raise ValueError(f"Blaschke zero must lie in the open disk, got {a!r}")
            if abs(abs(rot) - 1.0) > 1e-12:
                raise ValueError(f"Blaschke rotation must be unimodular, got {rot!r}")
            fs.append((a, rot / abs(rot)))
        self.factors = tuple(fs)
        num = np.ones(1, dtype=complex)
        den = np.ones(1, dtype=complex)
        for a, rot in self.factors:
            num = P.polymul(num, [-a * rot, rot])
            den = P.polymul(den, [1.0, -a.conjugate()])
        self._rational = RationalFunction(num, den, check=False)

    def poles(self) -> np.ndarray:
        return self._rational.poles()

    def _chart_series(self, z, order, recip):
        return self._rational._chart_series(z, order, recip)

    def to_rational(self) -> RationalFunction:
        return self._rational

    def __repr__(self) -> str:
        return f"BlaschkeProduct({list(self.factors)!r})"


# ---------------------------------------------------------------------------
# pointwise operations


@dataclass(frozen=True)
class DerivativeBundle:
    """f, f', f'' at a point.  With ``reciprocal`` set these belong to 1/f."""

    f: SpherePoint
    fprime: SpherePoint
    fsecond: SpherePoint
    reciprocal: bool = False


def evaluate(f: MeroFunction, z: complex) -> SpherePoint:
    if f.pole_distance(np.asarray(z)) < POLE_RADIUS:
        return INFINITY
    return SpherePoint.from_complex(complex(f.values(z)))


def eval_bundle(f: MeroFunction, z: complex) -> DerivativeBundle:
    (g, g1, g2), recip = f.jet(z, 2)
    pts = [SpherePoint.from_complex(complex(v)) for v in (g, g1, g2)]
    return DerivativeBundle(*pts, reciprocal=bool(recip))


def spherical_derivative(f: MeroFunction, z):
    """|f'(z)|/(1+|f(z)|^2); at a pole, the same quantity for 1/f."""
    out = f.fsharp(z)
    return float(out) if np.ndim(out) == 0 else out


def schwarzian(f: MeroFunction, z, tol: float = 1e-12):
    """S_f = f'''/f' - (3/2)(f''/f')^2, computed in the local chart.

    The Schwarzian is invariant under f -> 1/f, so the chart is immaterial.
    Raises CriticalPointError where the chart derivative vanishes.
    """
    (g, g1, g2, g3), _ = f.jet(z, 3)
    if np.any(np.abs(g1) <= tol):
        bad = np.asarray(z)[np.abs(g1) <= tol] if np.ndim(z) else z
        raise CriticalPointError(f"f' vanishes at {bad!r}; f is not locally univalent there")
    s = g3 / g1 - 1.5 * (g2 / g1) ** 2
    return complex(s) if np.ndim(s) == 0 else s


def liouville_residual(f: MeroFunction, z: complex, h: float) -> float:
    """Five-point Laplacian of log f# plus 4 (f#)^2 at z (zero for exact data)."""
    pts = np.array([z, z + h, z - h, z + 1j * h, z - 1j * h])
    u = np.log(f.fsharp(pts))
    lap = (u[1] + u[2] + u[3] + u[4] - 4 * u[0]) / h**2
    return float(lap + 4 * np.exp(2 * u[0]))


# ---------------------------------------------------------------------------
# local univalence


@dataclass(frozen=True)
class Witness:
    kind: str  # "critical_point", "multiple_pole", "constant", "small_fsharp"
    z: complex
    value: float = 0.0


@dataclass(frozen=True)
class UnivalenceReport:
    """Outcome of a local-univalence probe; a sampled check, not a proof."""

    is_locally_univalent: bool
    witnesses: Tuple[Witness, ...] = ()
    min_fsharp_on_grid: float = math.nan


def probe_local_univalence(
    f: MeroFunction,
    grid: Optional[GridSpec] = None,
    tol: float = 1e-10,
    cluster_tol: float = 1e-6,
) -> UnivalenceReport:
    """Look for critical points and multiple poles of f in the open disk.

    The exact part works on the rational form: zeros of P'Q - PQ' that are
    not poles, and clusters of denominator roots.  The sampled part checks
    that f# stays above ``tol`` on the grid; f# is chart-free and vanishes
    exactly at critical points and multiple poles.
    """
    witnesses: List[Witness] = []
    r = f.to_rational()
    dnum = np.trim_zeros(r.derivative_numerator(), "b")
    if dnum.size == 0 or not np.any(np.abs(dnum) > 0):
        witnesses.append(Witness("constant", 0j, 0.0))
    else:
        poles = r.poles()
        for c in _roots(dnum):
            if abs(c) >= 1.0:
                continue
            if poles.size and np.min(np.abs(poles - c)) < cluster_tol:
                continue
            witnesses.append(Witness("critical_point", complex(c), float(abs(P.polyval(c, dnum)))))
        seen = np.zeros(poles.size, dtype=bool)
        for i, p in enumerate(poles):
            if seen[i] or abs(p) >= 1.0:
                continue
            close = np.abs(poles - p) < cluster_tol
            seen |= close
            if np.count_nonzero(close) > 1:
                witnesses.append(Witness("multiple_pole", complex(np.mean(poles[close])), float(np.count_nonzero(close))))

    grid = DEFAULT_GRID if grid is None else grid
    pts = grid.points()
    fs = f.fsharp(pts)
    k = int(np.argmin(fs))
    if fs[k] <= tol and not witnesses:
        witnesses.append(Witness("small_fsharp", complex(pts[k]), float(fs[k])))
    return UnivalenceReport(not witnesses, tuple(witnesses), float(fs[k]))


# ---------------------------------------------------------------------------
# descriptors

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_TERM = re.compile(rf"([+-]?)({_NUM})?\s*\*?\s*([ij]?)")


def parse_complex(text: str) -> complex:
    """Parse literals like ``1``, ``-2.5i``, ``1+1.5i``, ``1.5i+1``, ``i``."""
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty complex literal")
    total = 0j
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if m is None or m.end() == pos or (m.group(2) is None and not m.group(3)):
            raise ValueError(f"cannot parse complex literal {text!r}")
        sign = -1.0 if m.group(1) == "-" else 1.0
        mag = float(m.group(2)) if m.group(2) is not None else 1.0
        total += sign * mag * (1j if m.group(3) else 1.0)
        pos = m.end()
        if pos < len(s) and s[pos] not in "+-":
            raise ValueError(f"cannot parse complex literal {text!r}")
    return total


def _split_top(text: str) -> List[str]:
    """Split on commas that are not inside parentheses."""
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    if cur.strip():
        parts.append(cur)
    return [p.strip() for p in parts]


def _parse_list(text: str) -> List[complex]:
    t = text.strip()
    if not (t.startswith("[") and t.endswith("]")):
        raise ValueError(f"expected a bracketed coefficient list, got {text!r}")
    return [parse_complex(x) for x in _split_top(t[1:-1])]


def parse_descriptor(text: str) -> MeroFunction:
    """Build a function from ``rational: [..]/[..]``, ``rigid_scaled: a=..,b=..,eta=..``
    or ``blaschke: [(p, theta), ...]``."""
    kind, sep, body = text.partition(":")
    if not sep:
        raise ValueError(f"descriptor needs a 'kind:' prefix: {text!r}")
    kind = kind.strip().lower()
    body = body.strip()
    if kind == "rational":
        num, slash, den = body.partition("/")
        return RationalFunction(_parse_list(num), _parse_list(den) if slash else [1])
    if kind == "rigid_scaled":
        params = {"a": 1 + 0j, "b": 0j, "eta": 1 + 0j}
        for item in _split_top(body):
            key, eq, val = item.partition("=")
            key = key.strip().lower()
            if not eq or key not in params:
                raise ValueError(f"bad rigid_scaled parameter {item!r}")
            params[key] = parse_complex(val)
        return RigidScaled(RigidMotion(params["a"], params["b"]), params["eta"])
    if kind == "blaschke":
        t = body.strip()
        if not (t.startswith("[") and t.endswith("]")):
            raise ValueError(f"expected [(p, theta), ...], got {body!r}")
        factors = []
        for item in _split_top(t[1:-1]):
            item = item.strip()
            if not (item.startswith("(") and item.endswith(")")):
                raise ValueError(f"bad Blaschke factor {item!r}")
            p_txt, _, th_txt = item[1:-1].partition(",")
            factors.append((parse_complex(p_txt), complex(math.cos(float(th_txt)), math.sin(float(th_txt)))))
        return BlaschkeProduct(factors)
    raise ValueError(f"unknown function kind {kind!r}")
