r"""Secular equations for radial Robin problems and the largest-root solver.

For a shell :math:`A_{r_1,r_2}\subset\mathbb R^d` with :math:`\lambda_1 = -k^2`,
the radial eigenfunction is :math:`r^{-\nu}[C_1K_\nu(kr)+C_2I_\nu(kr)]` and the
boundary conditions give a 2x2 determinant in :math:`k`. All functions here
evaluate it with the exponential and algebraic prefactors divided out, i.e.
as

.. math::
    \tilde m_{11}\tilde m_{22} - e^{-2k(r_2-r_1)}\,\tilde m_{21}\tilde m_{12},

which has the same zeros and sign as the unscaled determinant. The ball uses
regularity at the origin instead of an inner condition.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field, replace

from .errors import BracketFailure, DomainError
from .geometry import ShellGeometry, surface, volume
from .roots import bisect, secant_polish, sign_changes
from .specfun import scaled_neighbourhood

log = logging.getLogger(__name__)

__all__ = [
    "Boundary",
    "SecularProblem",
    "EigenResult",
    "shell_secular",
    "shell_leading",
    "ball_secular",
    "annulus_nr_secular",
    "secular_function",
    "solve_lambda1",
    "variational_bound",
    "add_observer",
    "remove_observer",
]

DEGENERATE_WIDTH = 1e-8
_K_RTOL = 1e-12
_CERT_POINTS = 24


class Boundary(str, enum.Enum):
    ROBIN = "robin"
    NEUMANN = "neumann"


@dataclass(frozen=True)
class SecularProblem:
    """A radial eigenvalue problem with one shared Robin parameter ``alpha <= 0``.

    ``inner_bc`` is ``None`` exactly when the geometry is a ball.
    """

    geometry: ShellGeometry
    inner_bc: Boundary | None
    alpha: float
    outer_bc: Boundary = Boundary.ROBIN

    def __post_init__(self):
        g = self.geometry
        if g.is_ball != (self.inner_bc is None):
            raise DomainError("inner_bc must be None for a ball and set for a shell")
        if self.outer_bc is not Boundary.ROBIN:
            raise DomainError("outer boundary must carry the Robin condition")
        if self.inner_bc is Boundary.NEUMANN and g.d != 2:
            raise DomainError("Neumann-Robin annuli are planar (d=2) only")
        if not math.isfinite(self.alpha) or self.alpha > 0:
            raise DomainError(f"alpha must be finite and <= 0, got {self.alpha}")
        if not g.is_ball and g.r2 - g.r1 <= DEGENERATE_WIDTH * g.r2:
            raise DomainError("shell too thin: r2 - r1 <= 1e-8 r2")

    @classmethod
    def ball(cls, d: int, r: float, alpha: float) -> "SecularProblem":
        return cls(ShellGeometry.ball(d, r), None, alpha)

    @classmethod
    def shell(cls, d: int, r1: float, r2: float, alpha: float) -> "SecularProblem":
        return cls(ShellGeometry(d, r1, r2), Boundary.ROBIN, alpha)

    @classmethod
    def annulus_nr(cls, r1: float, r2: float, alpha: float) -> "SecularProblem":
        return cls(ShellGeometry(2, r1, r2), Boundary.NEUMANN, alpha)

    @property
    def kind(self) -> str:
        if self.inner_bc is None:
            return "ball"
        return "shell" if self.inner_bc is Boundary.ROBIN else "annulus-nr"

    def with_alpha(self, alpha: float) -> "SecularProblem":
        return replace(self, alpha=alpha)

    def robin_surface(self) -> float:
        """Measure of the boundary carrying the Robin condition."""
        return surface(self.geometry, inner=self.inner_bc is Boundary.ROBIN)


@dataclass
class EigenResult:
    """First eigenvalue ``lambda1 = -k**2`` with certification data.

    ``scale`` is the largest ``|secular|`` at the ends of the sign-change
    bracket found by scanning; the residual is judged relative to it.
    """

    lambda1: float
    k: float
    residual: float
    bracket: tuple
    iterations: int
    scale: float = 0.0
    diagnostics: dict = field(default_factory=dict)


def variational_bound(p: SecularProblem) -> float:
    """Upper bound ``alpha * |Robin boundary| / |domain|`` from a constant test function."""
    return p.alpha * p.robin_surface() / volume(p.geometry)


# --------------------------------------------------------------------------
# secular functions
# --------------------------------------------------------------------------

def _outer_row(k, two_nu, r2, alpha):
    """(m~_21, m~_22) at the outer Robin face."""
    nu = 0.5 * two_nu
    (i_dn, i_0, i_up), (k_dn, k_0, k_up) = scaled_neighbourhood(two_nu, k * r2)
    m21 = -0.5 * k * (k_dn + k_up) - (nu / r2) * k_0 + alpha * k_0
    m22 = 0.5 * k * (i_dn + i_up) - (nu / r2) * i_0 + alpha * i_0
    return m21, m22


def _inner_row(k, two_nu, r1, alpha_inner):
    """(m~_11, m~_12) at the inner face; Neumann is ``alpha_inner = 0``."""
    nu = 0.5 * two_nu
    (i_dn, i_0, i_up), (k_dn, k_0, k_up) = scaled_neighbourhood(two_nu, k * r1)
    m11 = 0.5 * k * (k_dn + k_up) + (nu / r1) * k_0 + alpha_inner * k_0
    m12 = -0.5 * k * (i_dn + i_up) + (nu / r1) * i_0 + alpha_inner * i_0
    return m11, m12


def _shell_det(k, d, r1, r2, alpha_inner, alpha_outer):
    two_nu = d - 2
    m11, m12 = _inner_row(k, two_nu, r1, alpha_inner)
    m21, m22 = _outer_row(k, two_nu, r2, alpha_outer)
    coupling = math.exp(-2.0 * k * (r2 - r1))  # underflows cleanly to 0.0
    return m11 * m22 - coupling * m21 * m12


def _check_k(k):
    if not k > 0 or not math.isfinite(k):
        raise DomainError(f"k must be positive and finite, got {k}")


def shell_leading(k: float, d: int, r1: float, r2: float, alpha: float) -> float:
    """``m~_11 m~_22``: the shell determinant without its exponentially small coupling term."""
    _check_k(k)
    m11, _ = _inner_row(k, d - 2, r1, alpha)
    _, m22 = _outer_row(k, d - 2, r2, alpha)
    return m11 * m22


def shell_secular(k: float, p: SecularProblem) -> float:
    """Scaled Robin-Robin shell determinant at ``k``."""
    _check_k(k)
    g = p.geometry
    if g.is_ball:
        raise DomainError("shell_secular needs r1 > 0")
    if p.inner_bc is not Boundary.ROBIN:
        raise DomainError("shell_secular needs a Robin inner face")
    return _shell_det(k, g.d, g.r1, g.r2, p.alpha, p.alpha)


def ball_secular(k: float, d: int, r: float, alpha: float) -> float:
    """``k I_nu'(kr) - (nu/r) I_nu(kr) + alpha I_nu(kr)`` with ``e^{kr}/sqrt(2 pi k r)`` divided out."""
    _check_k(k)
    if not r > 0:
        raise DomainError(f"radius must be positive, got {r}")
    _, m22 = _outer_row(k, d - 2, r, alpha)
    return m22


def annulus_nr_secular(k: float, r1: float, r2: float, alpha: float) -> float:
    """Planar annulus, Neumann on ``|x| = r1`` and Robin on ``|x| = r2``.

    A positive multiple, ``2 k^2 sqrt(r1 r2) e^{-k(r2-r1)}`` times, of

        K_1(k r1) [k I_1(k r2) + alpha I_0(k r2)] - I_1(k r1) [k K_1(k r2) - alpha K_0(k r2)].
    """
    _check_k(k)
    if not 0 < r1 < r2:
        raise DomainError(f"need 0 < r1 < r2, got r1={r1}, r2={r2}")
    return _shell_det(k, 2, r1, r2, 0.0, alpha)


def secular_function(p: SecularProblem):
    """The scaled secular function ``k -> value`` appropriate to ``p``."""
    g, a = p.geometry, p.alpha
    if p.kind == "ball":
        return lambda k: _outer_row(k, g.d - 2, g.r2, a)[1]
    if p.kind == "shell":
        return lambda k: _shell_det(k, g.d, g.r1, g.r2, a, a)
    return lambda k: _shell_det(k, 2, g.r1, g.r2, 0.0, a)


# --------------------------------------------------------------------------
# solver
# --------------------------------------------------------------------------

_observers: list = []


def add_observer(fn) -> None:
    """Register ``fn(problem, result)``, called after every successful solve."""
    _observers.append(fn)


def remove_observer(fn) -> None:
    _observers.remove(fn)


def _notify(p, result):
    for fn in _observers:
        fn(p, result)
    return result


def _gap_hint(p: SecularProblem) -> float:
    """Rough spacing between the two largest radial roots at large |alpha|."""
    g = p.geometry
    if g.is_ball:
        return math.inf
    return 0.5 * (g.d - 1) * (1.0 / g.r1 + 1.0 / g.r2)


def _certify_above(f, k_start, k_max):
    """Log-spaced scan of ``(k_start, k_max]``; returns the highest sign-change bracket or None."""
    if k_max <= k_start:
        return None, 0
    ratio = (k_max / k_start) ** (1.0 / _CERT_POINTS)
    ks = [k_start * ratio ** i for i in range(_CERT_POINTS + 1)]
    vals = [f(k) for k in ks]
    changes = sign_changes(vals)
    if not changes:
        return None, len(ks)
    i = changes[-1]
    return (ks[i], ks[i + 1]), len(ks)


def solve_lambda1(p: SecularProblem) -> EigenResult:
    """Largest positive root ``k`` of the secular function, and ``lambda1 = -k^2``.

    The root lies above ``k_lo = sqrt(-alpha |dOmega|/|Omega|)`` (constant test
    function) and, for large ``|alpha|``, near ``-alpha + (d-1)/(2 r2)``. The
    search starts above that prediction, certifies by a coarse log-spaced scan
    up to ``4|alpha| + 10/width`` that nothing larger exists, then scans down
    for the first sign change.

    Raises
    ------
    BracketFailure
        If no sign change is found.
    ConvergenceFailure
        If refinement does not meet ``|dk| <= 1e-12 max(1, k)``.
    """
    if p.alpha == 0.0:
        return _notify(p, EigenResult(0.0, 0.0, 0.0, (0.0, 0.0), 0, 0.0, {"short_circuit": True}))

    g = p.geometry
    f = secular_function(p)
    alpha = p.alpha
    width = g.r2 - g.r1
    evals = 0

    k_lo = math.sqrt(-variational_bound(p))
    k_pred = -alpha + 0.5 * (g.d - 1) / g.r2
    k_start = max(k_lo, k_pred) + 1.0 / width
    f_start = f(k_start)
    evals += 1
    while f_start <= 0.0:
        k_start *= 2.0
        f_start = f(k_start)
        evals += 1
        if k_start > 1e3 * (k_pred + 1.0 / width):
            raise BracketFailure(f"secular function never positive above k={k_pred} ({p})")

    k_max = 4.0 * (-alpha) + 10.0 / width
    high, n_cert = _certify_above(f, k_start, k_max)
    evals += n_cert
    if high is not None:
        log.warning("root above the predicted branch for %s: bracket %s; restarting scan there", p, high)
        k_start = high[1]
        f_start = f(k_start)
        evals += 1

    # scan down from k_start for the first sign change
    step = min((k_start - k_lo) / 64.0, 0.25 * _gap_hint(p))
    step = max(step, 1e-6 * k_start)
    floor = 0.5 * k_lo
    k_hi, f_hi = k_start, f_start
    bracket = None
    while True:
        k_next = k_hi - step
        if k_next <= floor:
            k_next = floor
        if k_next <= 0.0:
            break
        f_next = f(k_next)
        evals += 1
        if f_next <= 0.0:
            bracket = (k_next, k_hi, f_next, f_hi)
            break
        if k_next == floor:
            break
        k_hi, f_hi = k_next, f_next
        if k_hi < k_lo:
            step = min(step, 0.1 * k_lo)
    if bracket is None:
        raise BracketFailure(f"no sign change between {floor} and {k_start} for {p}")

    a, b, fa, fb = bracket
    scale = max(abs(fa), abs(fb))
    if fa == 0.0:
        k, fk = a, 0.0
    else:
        a, b, fa, fb, n = bisect(f, a, b, fa, fb, xtol=0.0, rtol=1e-4)
        evals += n
        k, fk, n = secant_polish(f, a, b, fa, fb, tol=_K_RTOL * max(1.0, 0.5 * (a + b)))
        evals += n
    return _notify(p, EigenResult(
        lambda1=-k * k,
        k=k,
        residual=fk,
        bracket=(bracket[0], bracket[1]),
        iterations=evals,
        scale=scale,
        diagnostics={"k_lower_bound": k_lo, "k_start": k_start, "branch_restart": high is not None},
    ))
