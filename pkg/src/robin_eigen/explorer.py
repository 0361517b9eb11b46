"""Ball-versus-partner experiments: crossings, sweeps and annulus/disk intersections."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

from .errors import BracketFailure, ConvergenceFailure, DomainError
from .geometry import match_shell_to_ball
from .roots import bisect, secant, secant_polish, sign_changes
from .secular import SecularProblem, solve_lambda1, variational_bound
from .specfun import scaled_neighbourhood

log = logging.getLogger(__name__)

__all__ = [
    "SweepRow",
    "SweepTable",
    "CrossingReport",
    "IntersectionPoint",
    "sweep",
    "find_crossing",
    "a0",
    "find_y0",
    "alpha_limit",
    "intersection_F",
    "intersection_curve",
    "nr_annulus_near_disk",
]

ALPHA_TOL = 1e-8
_BOUND_SLACK = 1e-12


# --------------------------------------------------------------------------
# sweeps
# --------------------------------------------------------------------------

@dataclass
class SweepRow:
    alpha: float
    lambda_ball: float | None
    lambda_partner: float | None
    difference: float | None
    bound_ok: bool = True
    error: str | None = None


@dataclass
class SweepTable:
    """Rows ordered by ``alpha`` descending (from 0 towards -inf)."""

    rows: list = field(default_factory=list)

    def differences(self):
        return [r.difference for r in self.rows]

    def alphas(self):
        return [r.alpha for r in self.rows]

    def __len__(self):
        return len(self.rows)


def _solve_checked(p: SecularProblem) -> float:
    lam = solve_lambda1(p).lambda1
    bound = variational_bound(p)
    if lam > bound + _BOUND_SLACK * max(1.0, abs(bound)):
        raise BracketFailure(f"eigenvalue {lam} above the constant-function bound {bound} for {p}")
    return lam


def _row(reference: SecularProblem, partner: SecularProblem, alpha: float) -> SweepRow:
    try:
        lb = _solve_checked(reference.with_alpha(alpha))
        lp = _solve_checked(partner.with_alpha(alpha))
    except (BracketFailure, ConvergenceFailure, DomainError) as exc:
        return SweepRow(alpha, None, None, None, False, f"{type(exc).__name__}: {exc}")
    return SweepRow(alpha, lb, lp, lp - lb)


def sweep(reference: SecularProblem, partner: SecularProblem, alpha_grid) -> SweepTable:
    """Solve both problems on every ``alpha`` of the grid.

    Row order is descending in ``alpha`` regardless of input order; duplicates
    are dropped. Solver failures are recorded in the row, not raised.
    """
    alphas = sorted({float(a) for a in alpha_grid}, reverse=True)
    if alphas and alphas[0] > 0:
        raise DomainError("alpha grid must lie in (-inf, 0]")
    return SweepTable([_row(reference, partner, a) for a in alphas])


def linear_grid(alpha_start: float, alpha_end: float, steps: int):
    if steps < 2:
        raise DomainError(f"need at least 2 steps, got {steps}")
    h = (alpha_end - alpha_start) / (steps - 1)
    grid = [alpha_start + i * h for i in range(steps)]
    grid[-1] = alpha_end
    return grid


# --------------------------------------------------------------------------
# ball versus volume-matched shell
# --------------------------------------------------------------------------

@dataclass
class CrossingReport:
    """Sign change of ``lambda_1(shell) - lambda_1(ball)`` in ``alpha``.

    ``alpha_cross`` is ``nan`` when ``certified`` is false.
    """

    alpha_cross: float
    bracket: tuple
    samples: SweepTable
    certified: bool
    sign_changes: int = 0
    r2: float = math.nan


def find_crossing(d: int, r_ball: float, r1: float, alpha_range, resolution: float = 0.1) -> CrossingReport:
    """Locate where a volume-matched shell overtakes the ball.

    Samples ``alpha_range`` at spacing ``<= resolution``; the sign change closest
    to zero is then bisected down to ``|d alpha| <= 1e-8``.
    """
    lo, hi = sorted(float(a) for a in alpha_range)
    if not hi < 0:
        raise DomainError(f"alpha range must lie in (-inf, 0), got {alpha_range}")
    shell_geom = match_shell_to_ball(d, r_ball, r1)
    ball = SecularProblem.ball(d, r_ball, hi)
    shell = SecularProblem.shell(d, shell_geom.r1, shell_geom.r2, hi)

    steps = max(2, math.ceil((hi - lo) / resolution - 1e-9) + 1)
    table = sweep(ball, shell, linear_grid(hi, lo, steps))
    failed = [r for r in table.rows if r.error]
    if failed:
        raise BracketFailure(f"solver failed at alpha={failed[0].alpha}: {failed[0].error}")

    diffs = table.differences()
    changes = sign_changes(diffs)
    if not changes:
        return CrossingReport(math.nan, (lo, hi), table, False, 0, shell_geom.r2)

    i = changes[0]
    a_hi, a_lo = table.rows[i].alpha, table.rows[i + 1].alpha

    def diff(alpha):
        return _solve_checked(shell.with_alpha(alpha)) - _solve_checked(ball.with_alpha(alpha))

    a, b, _, _, _ = bisect(diff, a_lo, a_hi, diffs[i + 1], diffs[i], xtol=ALPHA_TOL, rtol=0.0)
    return CrossingReport(0.5 * (a + b), (a, b), table, True, len(changes), shell_geom.r2)


# --------------------------------------------------------------------------
# Neumann-Robin annulus against the disk of equal area
# --------------------------------------------------------------------------

def a0(y: float) -> float:
    """``(-y I0^2 + I0 I1 + y (1 + I1^2)) / (sqrt(2) y)``, evaluated through scaled Bessel values."""
    if not y > 0:
        raise DomainError(f"a0 needs y > 0, got {y}")
    (_, i0, i1), _ = scaled_neighbourhood(0, y)
    bracket = -y * (i0 - i1) * (i0 + i1) + i0 * i1
    try:
        big = math.exp(2.0 * y) / (2.0 * math.pi * y) * bracket
    except OverflowError:
        return math.copysign(math.inf, bracket)
    return (big + y) / (math.sqrt(2.0) * y)


def _a0_grid(y_max: float, points: int):
    return [y_max * (i + 1) / points for i in range(points)]


def find_y0(y_max: float = 50.0, points: int = 5000, method: str = "bisection") -> float:
    """The unique positive zero of :func:`a0`, certified unique on ``(0, y_max)``.

    ``method`` is ``"bisection"`` or ``"secant"``; the two share only the
    bracketing scan.
    """
    ys = _a0_grid(y_max, points)
    vals = [a0(y) for y in ys]
    changes = sign_changes(vals)
    if len(changes) != 1:
        raise BracketFailure(f"a0 has {len(changes)} sign changes on (0, {y_max}); expected exactly one")
    i = changes[0]
    lo, hi = ys[i], ys[i + 1]
    if method == "bisection":
        a, b, fa, fb, _ = bisect(a0, lo, hi, vals[i], vals[i + 1], xtol=0.0, rtol=2e-16)
        return a if abs(fa) <= abs(fb) else b
    if method == "secant":
        return secant(a0, lo, hi, tol=1e-16)
    raise DomainError(f"unknown method {method!r}")


def alpha_limit(y0: float, r3: float) -> float:
    """Limit of the intersection parameter as the annulus collapses onto the disk."""
    (_, i0, i1), _ = scaled_neighbourhood(0, y0)
    return -y0 * i1 / (r3 * i0)


def nr_annulus_near_disk(r3: float, epsilon: float):
    """Radii ``(sqrt(2 eps r3 + eps^2), r3 + eps)`` of the annulus with area ``pi r3^2``."""
    if not (r3 > 0 and epsilon > 0):
        raise DomainError(f"need r3 > 0 and epsilon > 0, got {r3}, {epsilon}")
    return math.sqrt(2.0 * epsilon * r3 + epsilon * epsilon), r3 + epsilon


def _intersection_terms(epsilon: float, k: float, r3: float):
    if not k > 0:
        raise DomainError(f"k must be positive, got {k}")
    r1, r2 = nr_annulus_near_disk(r3, epsilon)
    x1, x2, x3 = k * r1, k * r2, k * r3
    (_, i0_1, i1_1), (_, _, k1_1) = scaled_neighbourhood(0, x1)
    (_, i0_2, i1_2), (_, k0_2, k1_2) = scaled_neighbourhood(0, x2)
    (_, i0_3, i1_3), _ = scaled_neighbourhood(0, x3)
    c = math.exp(-2.0 * (x2 - x1))
    terms = (
        i0_3 * c * i1_1 * k1_2,
        -i0_3 * i1_2 * k1_1,
        i1_3 * c * i1_1 * k0_2,
        i1_3 * i0_2 * k1_1,
    )
    return math.fsum(terms), sum(abs(t) for t in terms)


def intersection_F(epsilon: float, k: float, r3: float) -> float:
    """Scaled form of ``F(eps, k, r3)``, the equation for a common ``(alpha, -k^2)``.

    Equal to ``F`` divided by the positive factor
    ``e^{k(r3 + r2 - r1)} / (2 sqrt(2 pi k r3) k sqrt(r1 r2))``. The ``K``
    singularities at small ``k r1`` enter only as products with ``I``.
    """
    return _intersection_terms(epsilon, k, r3)[0]


@dataclass
class IntersectionPoint:
    """Common point of the annulus and disk eigenvalue curves for one ``epsilon``.

    ``scale`` is the sum of magnitudes of the four products making up ``F`` at
    the root, the size against which ``residual`` is rounding noise.
    ``found`` is false (and ``k``, ``alpha`` are nan) when no root was bracketed.
    """

    epsilon: float
    k: float
    alpha: float
    residual: float = 0.0
    scale: float = 0.0
    found: bool = True


def _disk_alpha(k: float, r3: float) -> float:
    (_, i0, i1), _ = scaled_neighbourhood(0, k * r3)
    return -k * i1 / i0


def intersection_curve(r3: float, epsilon_list, k_max: float | None = None, points: int = 400):
    """Smallest positive root ``k`` of ``F(eps, ., r3)`` for each ``eps``, with its ``alpha``.

    The smallest ``k`` maps to the intersection closest to ``alpha = 0`` because
    ``k -> -k I1(k r3)/I0(k r3)`` is decreasing.
    """
    if not r3 > 0:
        raise DomainError(f"r3 must be positive, got {r3}")
    k_max = 20.0 / r3 if k_max is None else k_max
    ks = [k_max * (i + 1) / points for i in range(points)]
    out = []
    for eps in epsilon_list:
        def F(k, eps=eps):
            return intersection_F(eps, k, r3)

        vals = [F(k) for k in ks]
        changes = sign_changes(vals)
        if not changes:
            log.info("no intersection for epsilon=%g with k <= %g", eps, k_max)
            out.append(IntersectionPoint(eps, math.nan, math.nan, found=False))
            continue
        i = changes[0]
        fa, fb = vals[i], vals[i + 1]
        a, b, fa, fb, _ = bisect(F, ks[i], ks[i + 1], fa, fb, xtol=0.0, rtol=1e-6)
        k, fk, _ = secant_polish(F, a, b, fa, fb, tol=1e-15 * max(1.0, b))
        out.append(IntersectionPoint(eps, k, _disk_alpha(k, r3), fk, _intersection_terms(eps, k, r3)[1]))
    return out
