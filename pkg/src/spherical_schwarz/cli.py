"""Command-line front end: verification campaigns with JSON or CSV reports.

Exit codes: 0 success, 1 a verified inequality failed, 2 invalid or
infeasible input, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .bounds import BoundQuery, MAX_LEVEL, _check_level, origin_lower, origin_upper, pointwise_bounds
from .errors import ConvergenceError, InfeasibleLevelError
from .functions import _parse_list, parse_complex, parse_descriptor
from .grids import DEFAULT_GRID, GridSpec
from .liouville import count_solutions
from .membership import gn_counterexample, probe_membership
from .ode_pair import integrate_pair
from .rational_normality import (
    DEFAULT_POLES,
    PolePrescription,
    bernstein_factor,
    evaluate_rational,
    kn,
    rational_campaign,
)
from .schwarz_pick import extremal_map, extremal_parameters, sample_constrained_maps, sp_bound

EXIT_OK, EXIT_VIOLATION, EXIT_INVALID, EXIT_NONCONVERGENCE = 0, 1, 2, 3
BOUNDARY_TOL = 1e-8

# ---------------------------------------------------------------------------
# serialization


def _fmt_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    text = format(x, ".17g")
    if all(ch not in text for ch in ".en"):
        text += ".0"
    return text


def to_json(obj: Any, indent: int = 2, level: int = 0) -> str:
    """JSON with every float printed to 17 significant digits and complex as {re, im}."""
    pad, inner = " " * (indent * level), " " * (indent * (level + 1))
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return to_json({"re": float(obj.real), "im": float(obj.imag)}, indent, level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {to_json(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [inner + to_json(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _cell(v: Any) -> str:
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (complex, np.complexfloating)):
        return f"{format(v.real, '.17g')}{'+' if v.imag >= 0 else '-'}{format(abs(v.imag), '.17g')}j"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    return str(v)


def to_csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


class Outcome:
    """Payload of one subcommand: the JSON sections plus a CSV table."""

    def __init__(self, command: str, config: dict):
        self.command = command
        self.config = config
        self.results: Dict[str, Any] = {}
        self.residuals: Dict[str, Any] = {}
        self.verdicts: Dict[str, bool] = {}
        self.table: Tuple[List[str], List[list]] = ([], [])

    @property
    def ok(self) -> bool:
        return all(self.verdicts.values())

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return to_csv(*self.table)
        doc = {
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "residuals": self.residuals,
            "verdicts": self.verdicts,
        }
        return to_json(doc) + "\n"


# ---------------------------------------------------------------------------
# subcommands


def _grid_from(args) -> GridSpec:
    return GridSpec(
        radial_count=args.radial_count,
        angular_count=args.angular_count,
        max_radius=args.max_radius,
        refinement_radii=DEFAULT_GRID.refinement_radii,
    )


def _parse_sweep(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValueError(f"--sweep expects s0:s1:steps, got {text!r}")
    s0, s1, n = float(parts[0]), float(parts[1]), int(parts[2])
    if n < 1:
        raise ValueError("--sweep needs at least one step")
    return np.linspace(s0, s1, n)


BOUND_FIELDS = ["c", "s", "lower_thm2", "upper_thm2", "upper_thm3", "upper_steinmetz", "upper_envelope", "active_upper"]


def cmd_bounds(args) -> Outcome:
    out = Outcome("bounds", {"c": args.c, "s": args.s, "sweep": args.sweep})
    grid = _parse_sweep(args.sweep) if args.sweep else np.array([args.s])
    reports = [pointwise_bounds(BoundQuery(args.c, float(s))) for s in grid]
    rows = [r.as_dict() for r in reports]
    out.results["bounds"] = rows if args.sweep else rows[0]
    out.residuals["max_root_product_error"] = max(
        abs(r.lower_thm2 * r.upper_thm2 * (1 - r.s**2) ** 2 - 1.0) for r in reports
    )
    out.verdicts["envelope_ordering"] = all(
        r.lower_thm2 <= r.upper_envelope <= r.upper_steinmetz * (1 + 1e-15) for r in reports
    )
    out.table = (BOUND_FIELDS, [[row[k] for k in BOUND_FIELDS] for row in rows])
    return out


def cmd_verify(args) -> Outcome:
    f = parse_descriptor(args.function)
    if args.level is not None:
        _check_level(args.level)
    grid = _grid_from(args)
    out = Outcome("verify", {"function": args.function, "level": args.level, "grid": _grid_config(grid)})
    rep = probe_membership(f, grid)
    res = {
        "c_interior_estimate": rep.c_interior_estimate,
        "c_boundary_estimate": rep.c_boundary_estimate,
        "boundary_sequence": [list(x) for x in rep.boundary_sequence],
        "locally_univalent": rep.locally_univalent,
        "in_Fc_at_level": rep.in_Fc_at_level,
        "in_Gc_at_level": rep.in_Gc_at_level,
        "fsharp_at_origin": rep.fsharp_at_origin,
    }
    level = args.level
    if level is None and rep.in_Fc_at_level is not None:
        level = min(rep.in_Fc_at_level, MAX_LEVEL)
    member_F = rep.locally_univalent and level is not None and rep.c_interior_estimate >= level
    member_G = level is not None and rep.c_boundary_estimate >= level
    res["tested_level"] = level
    res["classification"] = "F_c" if member_F else ("G_c_only" if member_G else "neither")
    if member_F:
        lo, hi = origin_lower(level), origin_upper(level)
        fs0 = rep.fsharp_at_origin
        res["origin_bounds"] = {"lower": lo, "upper": hi}
        res["equality_at_origin"] = bool(min(abs(fs0 - lo), abs(fs0 - hi)) <= 1e-10 * hi)
        out.residuals["origin_slack"] = {"lower": fs0 - lo, "upper": hi - fs0}
        out.verdicts["origin_bound_compliance"] = bool(lo * (1 - 1e-12) <= fs0 <= hi * (1 + 1e-12))
    out.results = res
    out.table = (["key", "value"], [[k, v] for k, v in res.items() if not isinstance(v, (list, dict))])
    return out


def _grid_config(grid: GridSpec) -> dict:
    return {
        "radial_count": grid.radial_count,
        "angular_count": grid.angular_count,
        "max_radius": grid.max_radius,
        "refinement_radii": list(grid.refinement_radii),
    }


def cmd_bvp(args) -> Outcome:
    out = Outcome("bvp", {"c": args.c, "branch": args.branch, "stride": args.stride})
    if not args.c > 0:
        raise ValueError("level c must be positive")
    sc = count_solutions(args.c)
    wanted = {"both": None, "plus": {"plus", "double"}, "minus": {"minus", "double"}}[args.branch]
    trajs = [t for t in sc.trajectories if wanted is None or t.branch in wanted]
    out.results = {
        "count": sc.count,
        "label": sc.label,
        "discriminant": sc.discriminant,
        "notes": sc.notes,
        "trajectories": [
            {
                "branch": t.branch,
                "method": t.method,
                "initial_value": t.initial_value,
                "initial_slope": float(t.wprime[0]) if len(t.wprime) else None,
                "asymptotic_slope": t.asymptotic_slope,
                "eta_fit": t.eta_fit,
                "samples": [list(r) for r in t.rows(args.stride)],
            }
            for t in trajs
        ],
    }
    out.residuals["max_first_integral"] = max((t.max_residual for t in trajs), default=0.0)
    out.verdicts["count_cross_validated"] = sc.cross_validated
    rows = [[t.branch, *r] for t in trajs for r in t.rows(args.stride)]
    out.table = (["branch", "x", "w", "wprime", "first_integral_residual"], rows)
    return out


def cmd_splemma(args) -> Outcome:
    z0 = parse_complex(args.z0)
    if not 0 < abs(z0) < 1:
        raise ValueError("--z0 must satisfy 0 < |z0| < 1")
    out = Outcome("splemma", {"z0": z0, "samples": args.samples, "seed": args.seed})
    s = abs(z0)
    bound = sp_bound(s)
    ext = extremal_map(z0)
    _, w1, w2 = ext.derivatives_at_z0()
    samples = sample_constrained_maps(z0, args.samples, seed=args.seed)
    mx = max(r.wprime_abs for r in samples)
    theta = 2 * np.pi * np.arange(512) / 512
    boundary_dev = float(np.max(np.abs(np.abs(ext.values(np.exp(1j * theta))) - 1.0)))
    out.results = {
        "bound": bound,
        "extremal_parameters": extremal_parameters(z0),
        "extremal_wprime_abs": abs(w1),
        "max_sampled_wprime_abs": mx,
        "samples": len(samples),
    }
    out.residuals = {"extremal_equality_error": abs(abs(w1) - bound), "extremal_wsecond_abs": abs(w2), "extremal_boundary_modulus_error": boundary_dev}
    out.verdicts["samples_within_bound"] = mx <= bound + BOUNDARY_TOL
    out.table = (
        ["kind", "degree", "scale", "wprime_abs", "wsecond_abs"],
        [[r.kind, r.degree, r.scale, r.wprime_abs, r.wsecond_abs] for r in samples],
    )
    return out


def cmd_odecheck(args) -> Outcome:
    coeffs = _parse_list(args.schwarzian_coeffs) if args.schwarzian_coeffs.strip().startswith("[") else [parse_complex(args.schwarzian_coeffs)]
    out = Outcome("odecheck", {"schwarzian_coeffs": coeffs, "points": args.points, "seed": args.seed, "radius": args.radius})
    rng = np.random.default_rng(args.seed)
    r = args.radius * np.sqrt(rng.uniform(size=args.points))
    z = r * np.exp(2j * np.pi * rng.uniform(size=args.points))
    pair = integrate_pair(coeffs, z)
    wres = float(np.max(np.abs(pair.wronskian() - 1)))
    ident = float(np.max(np.abs(pair.fsharp_pair() - pair.fsharp_direct())))
    out.residuals = {"max_wronskian_residual": wres, "max_identity_error": ident}
    reference = None
    trimmed = np.trim_zeros(np.asarray(coeffs), "b")
    if trimmed.size == 0:
        reference = z
    elif trimmed.size == 1 and trimmed[0] == 2:
        reference = np.tan(z)
    if reference is not None:
        out.residuals["max_reference_error"] = float(np.max(np.abs(pair.f_values() - reference)))
    out.results = {"points": args.points, "fsharp_min": float(np.min(pair.fsharp_pair())), "fsharp_max": float(np.max(pair.fsharp_pair()))}
    out.verdicts = {"wronskian": wres <= 1e-8, "fsharp_identity": ident <= 1e-8}
    if reference is not None:
        out.verdicts["reference_solution"] = out.residuals["max_reference_error"] <= 1e-8
    rows = [
        [zz, a, b, abs(w - 1), fp, fd]
        for zz, a, b, w, fp, fd in zip(pair.targets, pair.w1, pair.w2, pair.wronskian(), pair.fsharp_pair(), pair.fsharp_direct())
    ]
    out.table = (["z", "w1", "w2", "wronskian_residual", "fsharp_pair", "fsharp_direct"], rows)
    return out


def cmd_rational(args) -> Outcome:
    poles = PolePrescription(tuple(_parse_list(args.poles)))
    out = Outcome("rational", {"poles": list(poles.poles), "numerator": args.numerator, "count": args.count, "seed": args.seed})
    if args.numerator:
        row = evaluate_rational(poles, _parse_list(args.numerator))
        if row is None:
            raise ValueError("the function is not locally univalent with positive grid infimum of f#")
        rows = [row]
    else:
        rows = rational_campaign(poles, args.count, seed=args.seed)
    theta = 2 * np.pi * np.arange(512) / 512
    kmax = float(np.max(bernstein_factor(poles, np.exp(1j * theta))))
    out.results = {
        "k_n": kn(poles),
        "max_bernstein_factor": kmax,
        "rows": [
            {"numerator": list(r.numerator), "c_f": r.c_f, "norm": r.norm, "bound": r.bound, "margin": r.margin}
            for r in rows
        ],
    }
    out.residuals = {"min_margin": min(r.margin for r in rows)}
    out.verdicts = {"norm_bound": all(r.holds for r in rows), "bernstein_domination": kmax <= kn(poles)}
    pole_text = " ".join(_cell(p) for p in poles.poles)
    out.table = (
        ["poles", "k_n", "c_f", "norm", "bound", "margin"],
        [[pole_text, r.k_n, r.c_f, r.norm, r.bound, r.margin] for r in rows],
    )
    return out


def cmd_counterexample(args) -> Outcome:
    if args.n < 2:
        raise ValueError("--n must be at least 2")
    out = Outcome("counterexample", {"n": args.n})
    _, rep = gn_counterexample(args.n)
    out.results = {
        "fsharp_at_origin": rep.fsharp_at_origin,
        "boundary_estimate": rep.boundary_estimate,
        "boundary_minimum": rep.boundary_minimum,
        "boundary_radius": rep.boundary_radius,
        "annulus": [{"radius": r, "max_deviation": d, "closed_form_bound": b} for r, d, b in rep.annulus],
    }
    out.residuals = {"origin_error": abs(rep.fsharp_at_origin - args.n**2)}
    out.verdicts = {
        "origin_growth": abs(rep.fsharp_at_origin - args.n**2) <= 1e-10 * args.n**2,
        "boundary_estimate": rep.boundary_minimum >= rep.boundary_estimate - 1e-3,
    }
    out.table = (["radius", "max_deviation", "closed_form_bound"], [list(r) for r in rep.annulus])
    return out


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spherical-schwarz", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--seed", type=int, default=42)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", parents=[common], help="pointwise bounds for f# at |z0| = s")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--s", type=float, default=0.0)
    p.add_argument("--sweep", default=None, help="s0:s1:steps")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("verify", parents=[common], help="sampled membership and bound compliance")
    p.add_argument("--function", required=True, help="descriptor, e.g. 'rational: [0,1]/[1]'")
    p.add_argument("--level", type=float, default=None)
    p.add_argument("--radial-count", type=int, default=DEFAULT_GRID.radial_count)
    p.add_argument("--angular-count", type=int, default=DEFAULT_GRID.angular_count)
    p.add_argument("--max-radius", type=float, default=DEFAULT_GRID.max_radius)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bvp", parents=[common], help="solution count of the radial boundary value problem")
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--branch", choices=("plus", "minus", "both"), default="both")
    p.add_argument("--stride", type=int, default=1000)
    p.set_defaults(func=cmd_bvp)

    p = sub.add_parser("splemma", parents=[common], help="refined Schwarz-Pick bound by sampling")
    p.add_argument("--z0", required=True)
    p.add_argument("--samples", type=int, default=1000)
    p.set_defaults(func=cmd_splemma)

    p = sub.add_parser("odecheck", parents=[common], help="w1/w2 decomposition for a polynomial Schwarzian")
    p.add_argument("--schwarzian-coeffs", required=True, help="ascending coefficients, e.g. '[2]' or '[0,1,0.5i]'")
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--radius", type=float, default=0.9)
    p.set_defaults(func=cmd_odecheck)

    p = sub.add_parser("rational", parents=[common], help="sup-norm bound for rationals with prescribed poles")
    p.add_argument("--poles", default="[" + ",".join(_cell(complex(q)).replace("j", "i") for q in DEFAULT_POLES) + "]")
    p.add_argument("--numerator", default=None, help="single numerator; otherwise random campaign")
    p.add_argument("--count", type=int, default=100)
    p.set_defaults(func=cmd_rational)

    p = sub.add_parser("counterexample", parents=[common], help="growth of g_n(z) = z/(1/n^2 + z^2)")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_counterexample)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        outcome = args.func(args)
    except InfeasibleLevelError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ConvergenceError as exc:
        print(f"error: numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    text = outcome.render(args.format)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not outcome.ok:
        print("verification failed: " + ", ".join(k for k, v in outcome.verdicts.items() if not v), file=sys.stderr)
        return EXIT_VIOLATION
    return EXIT_OK
