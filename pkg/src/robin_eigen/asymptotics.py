r"""Two-term eigenvalue predictions and the large-``k`` expansion of the shell determinant.

Large negative ``alpha``:  ``lambda_1 ~ -alpha^2 + c alpha`` with ``c = (d-1)/r2``
for shells, ``(d-1)/r`` for balls (``1/r3`` for a disk) and ``1/r2`` for the
Neumann-Robin annulus.

Small ``alpha``: ``lambda_1 ~ s alpha`` with ``s = |Robin boundary| / |domain|``;
for the Neumann-Robin annulus this is ``2 r2 / r3^2`` where ``r3^2 = r2^2 - r1^2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError
from .geometry import surface, volume
from .secular import SecularProblem

__all__ = [
    "Regime",
    "AsymptoticPrediction",
    "StepDiagnostics",
    "large_alpha_coefficient",
    "small_alpha_slope",
    "predict_large_alpha",
    "predict_small_alpha",
    "eval_f_expansion",
    "step_diagnostics",
    "step5_factorisation",
    "predicted_k",
    "relative_gap",
    "remainder_slope",
]


class Regime(str, enum.Enum):
    LARGE_NEG_ALPHA = "large-negative-alpha"
    SMALL_ALPHA = "small-alpha"


@dataclass(frozen=True)
class AsymptoticPrediction:
    lambda_pred: float
    regime: Regime
    leading_terms: tuple  # (coefficient of alpha^2, coefficient of alpha)


def large_alpha_coefficient(p: SecularProblem) -> float:
    """Coefficient ``c`` in ``lambda_1 = -alpha^2 + c alpha + o(alpha)``."""
    g = p.geometry
    if p.kind == "annulus-nr":
        return 1.0 / g.r2
    if p.kind in ("ball", "shell"):
        return (g.d - 1) / g.r2
    raise DomainError(f"unsupported problem kind {p.kind!r}")


def small_alpha_slope(p: SecularProblem) -> float:
    """Derivative of ``lambda_1`` in ``alpha`` at ``alpha = 0``."""
    g = p.geometry
    if p.kind == "annulus-nr":
        r3_sq = g.r2 ** 2 - g.r1 ** 2
        return 2.0 * g.r2 / r3_sq
    return surface(g) / volume(g)


def predict_large_alpha(p: SecularProblem, alpha: float | None = None) -> AsymptoticPrediction:
    alpha = p.alpha if alpha is None else alpha
    if not alpha < 0:
        raise DomainError(f"large-|alpha| prediction needs alpha < 0, got {alpha}")
    c = large_alpha_coefficient(p)
    return AsymptoticPrediction(-alpha * alpha + c * alpha, Regime.LARGE_NEG_ALPHA, (-1.0, c))


def predict_small_alpha(p: SecularProblem, alpha: float | None = None) -> AsymptoticPrediction:
    alpha = p.alpha if alpha is None else alpha
    s = small_alpha_slope(p)
    return AsymptoticPrediction(s * alpha, Regime.SMALL_ALPHA, (0.0, s))


# --------------------------------------------------------------------------
# expansion of f(k, alpha) = m~_11 m~_22
# --------------------------------------------------------------------------

def _poly(coeffs, d: int) -> int:
    """Integer polynomial in ``d``, coefficients from the highest degree down."""
    acc = 0
    for c in coeffs:
        acc = acc * d + c
    return acc


_D1 = (1, -4, 7)                    # d^2 - 4d + 7
_D3 = (1, -4, 3)                    # d^2 - 4d + 3
_D5 = (1, -4, 5)                    # d^2 - 4d + 5
_KK_S2 = (1, -8, 38, -88, 57)       # d^4 - 8d^3 + 38d^2 - 88d + 57
_AA_S2 = (1, -8, 14, 8, -15)        # d^4 - 8d^3 + 14d^2 + 8d - 15


def eval_f_expansion(k: float, alpha: float, r1: float, r2: float, d: int, order: int = 2) -> float:
    """Large-``k`` expansion of ``m~_11 m~_22`` for the Robin shell.

    ``order`` (0, 1 or 2) is the highest power of ``1/k`` kept inside each
    bracketed group. The remainder is ``O(1/k)`` along ``alpha + k = O(1)``
    when ``order = 2``.
    """
    if not k > 0:
        raise DomainError(f"k must be positive, got {k}")
    if not 0 < r1 < r2 or int(d) != d or d < 2:
        raise DomainError(f"invalid shell: d={d}, r1={r1}, r2={r2}")
    if order not in (0, 1, 2):
        raise DomainError(f"order must be 0, 1 or 2, got {order}")
    d = int(d)
    d1, d3, d5 = _poly(_D1, d), _poly(_D3, d), _poly(_D5, d)
    kk_s2, aa_s2 = _poly(_KK_S2, d), _poly(_AA_S2, d)
    nu = 0.5 * (d - 2)
    u = 1.0 / r1 - 1.0 / r2
    s2 = 1.0 / r1 ** 2 + 1.0 / r2 ** 2
    pr = 1.0 / (r1 * r2)
    inv = 1.0 / k
    o1 = 1.0 if order >= 1 else 0.0
    o2 = 1.0 if order >= 2 else 0.0

    g_kk = 1.0 + o1 * d1 * inv * u / 8 + o2 * inv * inv * (-d1 * d1 * pr / 64 + kk_s2 * s2 / 128)
    g_ka = 1.0 + o1 * d5 * inv * u / 8 + o2 * inv * inv * d1 * d3 * u * u / 128
    g_aa = 1.0 + o1 * d3 * inv * u / 8 + o2 * inv * inv * (-d3 * d3 * pr / 64 + aa_s2 * s2 / 128)
    g_nk = u + o1 * inv * (-d1 * pr / 4 + d3 * s2 / 8)
    g_na = u + o1 * inv * d3 * u * u / 8

    return (
        k * k * g_kk
        + 2.0 * k * alpha * g_ka
        + alpha * alpha * g_aa
        + nu * k * g_nk
        - nu * nu * pr
        + nu * alpha * g_na
    )


def step5_factorisation(k: float, alpha: float, r1: float, r2: float, d: int) -> float:
    """``(k + alpha - (d-1)/(2 r2)) (k + alpha + (d-1)/(2 r1))``."""
    return (k + alpha - 0.5 * (d - 1) / r2) * (k + alpha + 0.5 * (d - 1) / r1)


@dataclass(frozen=True)
class StepDiagnostics:
    """Quantities that tend to zero along ``alpha -> -inf`` at a solved eigenpair."""

    alpha_over_k2: float
    alpha2_over_k3: float
    one_plus_alpha_over_k: float
    sum_sq_over_k: float
    branch_gap: float

    def as_tuple(self):
        return (
            self.alpha_over_k2,
            self.alpha2_over_k3,
            self.one_plus_alpha_over_k,
            self.sum_sq_over_k,
            self.branch_gap,
        )


def step_diagnostics(k: float, alpha: float, d: int, r2: float) -> StepDiagnostics:
    """The five ratios used to bootstrap ``k = -alpha + (d-1)/(2 r2) + o(1)``.

    All five tend to zero as ``alpha -> -inf`` along the first branch.
    """
    if not (k > 0 and alpha < 0):
        raise DomainError(f"need k > 0 and alpha < 0, got k={k}, alpha={alpha}")
    s = k + alpha
    return StepDiagnostics(
        alpha / (k * k),
        alpha * alpha / k ** 3,
        1.0 + alpha / k,
        s * s / k,
        s - 0.5 * (d - 1) / r2,
    )


def predicted_k(p: SecularProblem, alpha: float | None = None) -> float:
    """Large-``|alpha|`` root prediction ``-alpha + c/2``."""
    alpha = p.alpha if alpha is None else alpha
    return -alpha + 0.5 * large_alpha_coefficient(p)


def relative_gap(lambda1: float, alpha: float, c: float) -> float:
    """``|(lambda1 + alpha^2)/alpha - c|``, the o(1) remainder of the large-|alpha| law."""
    return abs((lambda1 + alpha * alpha) / alpha - c)


def remainder_slope(xs, ys) -> float:
    """Least-squares slope of ``log|y|`` against ``log x``."""
    lx = [math.log(x) for x in xs]
    ly = [math.log(abs(y)) for y in ys]
    mx = sum(lx) / len(lx)
    my = sum(ly) / len(ly)
    num = sum((a - mx) * (b - my) for a, b in zip(lx, ly))
    den = sum((a - mx) ** 2 for a in lx)
    return num / den
