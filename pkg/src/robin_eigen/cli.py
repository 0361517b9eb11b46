"""Command-line front end: ``robin-eigen {eig,sweep,crossing,verify}``.

Every command prints one record to stdout, JSON by default::

    {"schema_version": "1", "command": ..., "inputs": ..., "results": ..., "diagnostics": ...}

``sweep --format csv`` prints a table instead. Logs go to stderr.

Exit codes: 0 success, 1 a verified property failed, 2 usage or domain
error, 3 numerical failure (no bracket / no convergence). Errors print a
single-line JSON payload with an ``error`` member.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import math
import sys
from dataclasses import dataclass, field

from . import __version__
from .asymptotics import (
    large_alpha_coefficient,
    relative_gap,
    step_diagnostics,
)
from .errors import BracketFailure, ConvergenceFailure, DomainError
from .explorer import (
    a0,
    alpha_limit,
    find_crossing,
    find_y0,
    intersection_curve,
    linear_grid,
    sweep,
)
from .geometry import (
    PlanarSummary,
    disk_radius_from_area,
    match_shell_to_ball,
    radii_from_summary,
)
from .roots import sign_changes
from .secular import SecularProblem, solve_lambda1, variational_bound

log = logging.getLogger("robin_eigen")

SCHEMA_VERSION = "1"
EXIT_OK, EXIT_PROPERTY, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3
CSV_HEADER = ("alpha", "lambda_ball", "lambda_partner", "difference")
_BOUND_SLACK = 1e-12


class UsageError(DomainError):
    """Flag combination that argparse alone cannot reject."""


# --------------------------------------------------------------------------
# encoding
# --------------------------------------------------------------------------

def _jsonable(x):
    """Replace non-finite floats by ``None`` (strict JSON has no NaN)."""
    if isinstance(x, float):
        return x if math.isfinite(x) else None
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _record(command, inputs, results, diagnostics) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "results": results,
        "diagnostics": diagnostics,
    }


def encode_json(record: dict) -> str:
    return json.dumps(_jsonable(record), indent=2, allow_nan=False) + "\n"


def _fmt17(x) -> str:
    # '%.17g' is locale independent and round-trips every double
    return "" if x is None or not math.isfinite(x) else format(x, ".17g")


def encode_csv(rows) -> str:
    """CSV with the fixed header; a ``diagnostic`` column is appended only if a row failed."""
    with_diag = any(r.error for r in rows)
    header = list(CSV_HEADER) + (["diagnostic"] if with_diag else [])
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for r in rows:
        cells = [_fmt17(r.alpha), _fmt17(r.lambda_ball), _fmt17(r.lambda_partner), _fmt17(r.difference)]
        if with_diag:
            cells.append(json.dumps(r.error or ""))
        buf.write(",".join(cells) + "\n")
    return buf.getvalue()


# --------------------------------------------------------------------------
# problem construction from flags
# --------------------------------------------------------------------------

def _annulus_radii(args):
    if args.area is not None or args.outer_perimeter is not None:
        if args.area is None or args.outer_perimeter is None:
            raise UsageError("--area and --outer-perimeter must be given together")
        if args.r1 is not None or args.r2 is not None:
            raise UsageError("give either --r1/--r2 or --area/--outer-perimeter, not both")
        return radii_from_summary(PlanarSummary(args.outer_perimeter, args.area))
    if args.r1 is None or args.r2 is None:
        raise UsageError("annulus needs --r1 and --r2 (or --area and --outer-perimeter)")
    return args.r1, args.r2


def problem_from_args(args) -> SecularProblem:
    kind, d, alpha = args.kind, args.d, args.alpha
    if kind == "ball":
        if args.r is not None:
            r = args.r
        elif args.area is not None:
            if d != 2:
                raise UsageError("--area describes a planar domain; use --d 2")
            r = disk_radius_from_area(args.area)
        else:
            raise UsageError("ball needs --r (or --area for a disk)")
        return SecularProblem.ball(d, r, alpha)
    if kind == "shell":
        if args.area is not None or args.outer_perimeter is not None:
            if d != 2:
                raise UsageError("--area/--outer-perimeter describe a planar domain; use --d 2")
        r1, r2 = _annulus_radii(args)
        if r1 == 0.0:
            return SecularProblem.ball(d, r2, alpha)
        return SecularProblem.shell(d, r1, r2, alpha)
    if kind == "annulus-nr":
        if d != 2:
            raise UsageError("annulus-nr is planar; use --d 2")
        r1, r2 = _annulus_radii(args)
        if r1 == 0.0:
            # no inner circle is left: the disk
            return SecularProblem.ball(2, r2, alpha)
        return SecularProblem.annulus_nr(r1, r2, alpha)
    raise UsageError(f"unknown kind {kind!r}")


def _describe(p: SecularProblem) -> dict:
    g = p.geometry
    return {"kind": p.kind, "d": g.d, "r1": g.r1, "r2": g.r2}


def _solve_record(p: SecularProblem):
    res = solve_lambda1(p)
    bound = variational_bound(p)
    results = {
        "lambda1": res.lambda1,
        "k": res.k,
        "residual": res.residual,
        "variational_bound": bound,
    }
    diagnostics = {
        "residual_scale": res.scale,
        "relative_residual": abs(res.residual) / res.scale if res.scale else 0.0,
        "bracket": list(res.bracket),
        "evaluations": res.iterations,
        "k_tolerance": 1e-12 * max(1.0, res.k),
        "branch_restart": bool(res.diagnostics.get("branch_restart", False)),
        "bound_satisfied": res.lambda1 <= bound + _BOUND_SLACK * max(1.0, abs(bound)),
    }
    return results, diagnostics


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

@dataclass
class Outcome:
    text: str
    code: int = EXIT_OK


def cmd_eig(args) -> Outcome:
    p = problem_from_args(args)
    results, diagnostics = _solve_record(p)
    inputs = {"kind": args.kind, "d": args.d, "alpha": args.alpha, "geometry": _describe(p)}
    return Outcome(encode_json(_record("eig", inputs, results, diagnostics)))


def _sweep_pair(args):
    """(reference ball, partner) at alpha = 0 from the sweep flags."""
    if args.partner == "shell":
        if args.r2 is None:
            if args.r1 is None:
                raise UsageError("shell partner needs --r1 (volume-matched) or --r1 and --r2")
            g = match_shell_to_ball(args.d, args.r, args.r1)
            return SecularProblem.ball(args.d, args.r, 0.0), SecularProblem.shell(args.d, g.r1, g.r2, 0.0)
        if args.r1 is None:
            raise UsageError("--r2 needs --r1")
        return SecularProblem.ball(args.d, args.r, 0.0), SecularProblem.shell(args.d, args.r1, args.r2, 0.0)
    if args.d != 2:
        raise UsageError("annulus-nr partner is planar; use --d 2")
    r1, r2 = _annulus_radii(args)
    if not 0.0 < r1 < r2:
        raise DomainError(f"annulus needs 0 < r1 < r2, got {r1}, {r2}")
    r_ball = args.r if args.r_given else math.sqrt(r2 * r2 - r1 * r1)
    return SecularProblem.ball(2, r_ball, 0.0), SecularProblem.annulus_nr(r1, r2, 0.0)


def cmd_sweep(args) -> Outcome:
    ball, partner = _sweep_pair(args)
    if args.alpha_start > 0 or args.alpha_end > 0:
        raise DomainError("alpha must lie in (-inf, 0]")
    grid = linear_grid(args.alpha_start, args.alpha_end, args.steps)
    table = sweep(ball, partner, grid)
    failures = sum(1 for r in table.rows if r.error)
    if args.format == "csv":
        text = encode_csv(table.rows)
    else:
        inputs = {
            "ball": _describe(ball),
            "partner": _describe(partner),
            "alpha_start": args.alpha_start,
            "alpha_end": args.alpha_end,
            "steps": args.steps,
        }
        rows = [
            {
                "alpha": r.alpha,
                "lambda_ball": r.lambda_ball,
                "lambda_partner": r.lambda_partner,
                "difference": r.difference,
                "diagnostic": r.error,
            }
            for r in table.rows
        ]
        diagnostics = {
            "failed_rows": failures,
            "sign_changes": len(sign_changes([r.difference for r in table.rows if r.difference is not None])),
            "k_tolerance": "1e-12 relative per eigenvalue",
            "bound_checked": True,
        }
        text = encode_json(_record("sweep", inputs, {"rows": rows}, diagnostics))
    return Outcome(text)


def cmd_crossing(args) -> Outcome:
    if args.alpha_lo > args.alpha_hi:
        raise UsageError(f"--alpha-lo ({args.alpha_lo}) must not exceed --alpha-hi ({args.alpha_hi})")
    rep = find_crossing(args.d, args.r_ball, args.r1, (args.alpha_lo, args.alpha_hi), args.resolution)
    inputs = {
        "d": args.d,
        "r_ball": args.r_ball,
        "r1": args.r1,
        "r2": rep.r2,
        "alpha_lo": args.alpha_lo,
        "alpha_hi": args.alpha_hi,
        "resolution": args.resolution,
    }
    results = {"certified": rep.certified, "alpha_cross": rep.alpha_cross, "bracket": list(rep.bracket)}
    diagnostics = {
        "alpha_tolerance": 1e-8 if rep.certified else None,
        "samples": len(rep.samples),
        "sign_changes": rep.sign_changes,
    }
    return Outcome(encode_json(_record("crossing", inputs, results, diagnostics)))


# --------------------------------------------------------------------------
# verification suites
# --------------------------------------------------------------------------

@dataclass
class Check:
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)

    def as_dict(self):
        return {"name": self.name, "passed": bool(self.passed), "measured": self.measured}


DYADIC_ALPHAS = tuple(-(2.0 ** j) for j in range(-6, 7))
DECADE_ALPHAS = (-1e2, -1e3, -1e4)


def _default_problems():
    sq2 = math.sqrt(2.0)
    return [
        SecularProblem.ball(2, 1.0, 0.0),
        SecularProblem.ball(3, 1.0, 0.0),
        SecularProblem.shell(2, 1.0, 2.0, 0.0),
        SecularProblem.shell(3, 1.0, 2.0, 0.0),
        SecularProblem.shell(2, 1.0, sq2, 0.0),
        SecularProblem.shell(3, 1.0, sq2, 0.0),
        SecularProblem.annulus_nr(1.0, 2.0, 0.0),
        SecularProblem.annulus_nr(1.0, sq2, 0.0),
    ]


def _label(p: SecularProblem) -> str:
    g = p.geometry
    if p.kind == "ball":
        return f"ball(d={g.d}, r={g.r2:g})"
    return f"{p.kind}(d={g.d}, r1={g.r1:g}, r2={g.r2:.6g})"


def verify_bounds(problems=None, alphas=DYADIC_ALPHAS):
    """``lambda_1 <= alpha |Robin boundary| / |domain|`` at every grid point."""
    checks = []
    for base in problems or _default_problems():
        worst = -math.inf
        for a in alphas:
            p = base.with_alpha(a)
            lam = solve_lambda1(p).lambda1
            bound = variational_bound(p)
            worst = max(worst, (lam - bound) / max(1.0, abs(bound)))
        checks.append(Check(f"bound {_label(base)}", worst <= _BOUND_SLACK,
                            {"max_relative_excess": worst, "points": len(alphas)}))
    return checks


def _strictly_decreasing(xs, floor: float = 0.0) -> bool:
    """``xs[i+1] < xs[i]`` unless both already sit below the rounding ``floor``."""
    return all(b < a or max(a, b) <= floor for a, b in zip(xs, xs[1:]))


# the last bootstrap ratio vanishes identically for d = 3 (up to e^{-2k})
_DIAG_FLOOR = 1e-9


def verify_asymptotics(problems=None, alphas=DECADE_ALPHAS):
    """Large-``|alpha|`` law and the bootstrap ratios along decades of ``alpha``."""
    checks = []
    for base in problems or _default_problems():
        c = large_alpha_coefficient(base)
        gaps, diag_rows = [], []
        for a in alphas:
            res = solve_lambda1(base.with_alpha(a))
            gaps.append(relative_gap(res.lambda1, a, c))
            s = step_diagnostics(res.k, a, base.geometry.d, base.geometry.r2)
            diag_rows.append([abs(v) for v in s.as_tuple()])
        label = _label(base)
        checks.append(Check(f"gap decreasing {label}", _strictly_decreasing(gaps) and gaps[-1] <= 1e-2,
                            {"alphas": list(alphas), "gaps": gaps, "coefficient": c}))
        columns = list(zip(*diag_rows))
        ok = all(_strictly_decreasing(col, _DIAG_FLOOR) for col in columns)
        checks.append(Check(f"step diagnostics decreasing {label}", ok,
                            {"alphas": list(alphas), "diagnostics": [list(r) for r in diag_rows]}))
    return checks


def verify_intersection(r3: float = 1.0, epsilons=(1e-1, 1e-2, 1e-3, 1e-4)):
    """Uniqueness of ``y0`` and convergence of ``k(eps) r3`` towards it."""
    checks = []
    ys = [50.0 * (i + 1) / 5000 for i in range(5000)]
    n_changes = len(sign_changes([a0(y) for y in ys]))
    checks.append(Check("a0 has one sign change on (0, 50)", n_changes == 1, {"sign_changes": n_changes}))
    y_bis = find_y0(method="bisection")
    y_sec = find_y0(method="secant")
    checks.append(Check("y0 bisection vs secant", abs(y_bis - y_sec) <= 1e-10,
                        {"bisection": y_bis, "secant": y_sec, "difference": abs(y_bis - y_sec)}))
    pts = intersection_curve(r3, epsilons)
    found = all(p.found for p in pts)
    dist = [abs(p.k * r3 - y_bis) if p.found else math.inf for p in pts]
    checks.append(Check("|k(eps) r3 - y0| decreasing", found and _strictly_decreasing(dist),
                        {"epsilons": list(epsilons), "k": [p.k for p in pts], "distance": dist}))
    rel = [abs(p.residual) / p.scale if p.found and p.scale else math.inf for p in pts]
    checks.append(Check("intersection residuals", max(rel) <= 1e-10, {"relative_residual": rel}))
    limit = alpha_limit(y_bis, r3)
    adist = [abs(p.alpha - limit) for p in pts]
    checks.append(Check("alpha(eps) approaches its limit", found and _strictly_decreasing(adist),
                        {"alpha": [p.alpha for p in pts], "alpha_limit": limit, "distance": adist}))
    return checks


def cmd_verify(args) -> Outcome:
    if args.suite == "bounds":
        checks = verify_bounds()
        inputs = {"suite": "bounds", "alphas": list(DYADIC_ALPHAS)}
    elif args.suite == "asymptotics":
        checks = verify_asymptotics()
        inputs = {"suite": "asymptotics", "alphas": list(DECADE_ALPHAS)}
    else:
        if not args.r3 > 0:
            raise DomainError(f"--r3 must be positive, got {args.r3}")
        checks = verify_intersection(args.r3)
        inputs = {"suite": "intersection", "r3": args.r3}
    for c in checks:
        log.info("%s %s", "PASS" if c.passed else "FAIL", c.name)
    all_ok = all(c.passed for c in checks)
    results = {"passed": all_ok, "checks": [c.as_dict() for c in checks]}
    diagnostics = {"failed": sum(not c.passed for c in checks), "total": len(checks)}
    return Outcome(encode_json(_record("verify", inputs, results, diagnostics)),
                   EXIT_OK if all_ok else EXIT_PROPERTY)


# --------------------------------------------------------------------------
# argument parsing
# --------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    """Argparse with usage errors routed through the JSON error payload."""

    def error(self, message):
        raise UsageError(message)


def _add_radii(sp):
    sp.add_argument("--r1", type=float, help="inner radius")
    sp.add_argument("--r2", type=float, help="outer radius")
    sp.add_argument("--area", type=float, help="planar area (with --outer-perimeter)")
    sp.add_argument("--outer-perimeter", type=float, help="length of the outer boundary")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="robin-eigen", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--out", metavar="FILE", help="also write the output to FILE")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("eig", help="first eigenvalue of one domain")
    sp.add_argument("--kind", choices=("ball", "shell", "annulus-nr"), required=True)
    sp.add_argument("--d", type=int, default=2, help="dimension (default 2)")
    sp.add_argument("--r", type=float, help="ball radius")
    _add_radii(sp)
    sp.add_argument("--alpha", type=float, required=True)
    sp.set_defaults(func=cmd_eig)

    sp = sub.add_parser("sweep", help="ball against a partner domain over a grid of alpha")
    sp.add_argument("--partner", choices=("shell", "annulus-nr"), default="shell")
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--r", type=float, default=None,
                    help="ball radius (default 1 for shells, equal-area disk for annulus-nr)")
    _add_radii(sp)
    sp.add_argument("--alpha-start", type=float, required=True)
    sp.add_argument("--alpha-end", type=float, required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--format", choices=("json", "csv"), default="json")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("crossing", help="alpha where a volume-matched shell overtakes the ball")
    sp.add_argument("--d", type=int, default=2)
    sp.add_argument("--r-ball", type=float, default=1.0)
    sp.add_argument("--r1", type=float, required=True)
    sp.add_argument("--alpha-lo", type=float, required=True)
    sp.add_argument("--alpha-hi", type=float, required=True)
    sp.add_argument("--resolution", type=float, default=0.1, help="sampling step in alpha")
    sp.set_defaults(func=cmd_crossing)

    sp = sub.add_parser("verify", help="run a property suite; exit 1 if any property fails")
    sp.add_argument("--suite", choices=("asymptotics", "bounds", "intersection"), required=True)
    sp.add_argument("--r3", type=float, default=1.0, help="disk radius for the intersection suite")
    sp.set_defaults(func=cmd_verify)
    return parser


def _error_payload(command, code, exc) -> str:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "error": {"code": code, "type": type(exc).__name__, "message": str(exc)},
    }
    return json.dumps(payload, separators=(",", ":"), allow_nan=False) + "\n"


def _emit(text: str, out_path):
    sys.stdout.write(text)
    sys.stdout.flush()
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    command, out_path = None, None
    try:
        args = parser.parse_args(argv)
        command, out_path = args.command, args.out
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
        if getattr(args, "partner", None) is not None:
            args.r_given = args.r is not None
            if args.r is None:
                args.r = 1.0
        outcome = args.func(args)
    except DomainError as exc:
        _emit(_error_payload(command, EXIT_USAGE, exc), out_path)
        return EXIT_USAGE
    except (BracketFailure, ConvergenceFailure) as exc:
        _emit(_error_payload(command, EXIT_NUMERICAL, exc), out_path)
        return EXIT_NUMERICAL
    _emit(outcome.text, out_path)
    return outcome.code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
