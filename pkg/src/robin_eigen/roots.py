"""Scalar root finding on a sign-changing bracket."""

from __future__ import annotations

import math

from .errors import BracketFailure, ConvergenceFailure


def _opposite(fa: float, fb: float) -> bool:
    return (fa < 0.0 < fb) or (fb < 0.0 < fa)


def bisect(f, a, b, fa=None, fb=None, xtol=0.0, rtol=4e-16, maxiter=200):
    """Shrink ``[a, b]`` by halving until its width is below ``xtol + rtol*|x|``.

    Returns ``(a, b, fa, fb, evaluations)``; an exact zero collapses the bracket.
    """
    fa = f(a) if fa is None else fa
    fb = f(b) if fb is None else fb
    if fa == 0.0:
        return a, a, fa, fa, 0
    if fb == 0.0:
        return b, b, fb, fb, 0
    if not _opposite(fa, fb):
        raise BracketFailure(f"no sign change on [{a}, {b}]: f={fa}, {fb}")
    for it in range(1, maxiter + 1):
        m = 0.5 * (a + b)
        if abs(b - a) <= xtol + rtol * abs(m) or m in (a, b):
            return a, b, fa, fb, it - 1
        fm = f(m)
        if fm == 0.0:
            return m, m, fm, fm, it
        if _opposite(fa, fm):
            b, fb = m, fm
        else:
            a, fa = m, fm
    raise ConvergenceFailure(f"bisection did not reach width {xtol} in {maxiter} steps")


def secant_polish(f, a, b, fa, fb, tol, maxiter=60):
    """Secant iteration kept inside a sign-changing bracket.

    Steps that would leave the bracket fall back to its midpoint. Stops when
    the update is at most ``tol``. Returns ``(x, fx, evaluations)`` for the
    point of smallest ``|f|`` seen.
    """
    if fa == 0.0 or a == b:
        return a, fa, 0
    if fb == 0.0:
        return b, fb, 0
    best = (a, fa) if abs(fa) <= abs(fb) else (b, fb)
    x0, f0, x1, f1 = a, fa, b, fb
    for it in range(1, maxiter + 1):
        denom = f1 - f0
        x2 = x1 - f1 * (x1 - x0) / denom if denom != 0.0 else 0.5 * (a + b)
        if not (min(a, b) < x2 < max(a, b)):
            x2 = 0.5 * (a + b)
        f2 = f(x2)
        if abs(f2) < abs(best[1]):
            best = (x2, f2)
        if f2 == 0.0:
            return x2, f2, it
        if _opposite(fa, f2):
            b, fb = x2, f2
        else:
            a, fa = x2, f2
        step = abs(x2 - x1)
        x0, f0, x1, f1 = x1, f1, x2, f2
        if step <= tol or abs(b - a) <= tol:
            return best[0], best[1], it
    raise ConvergenceFailure(f"secant refinement did not converge to {tol} in {maxiter} steps")


def secant(f, x0, x1, tol=1e-15, maxiter=100):
    """Plain (unbracketed) secant iteration; converges on step size ``tol*max(1,|x|)``."""
    f0, f1 = f(x0), f(x1)
    for _ in range(maxiter):
        if f1 == f0:
            if f1 == 0.0:
                return x1
            raise ConvergenceFailure("secant: zero slope")
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not math.isfinite(x2):
            raise ConvergenceFailure("secant diverged")
        x0, f0 = x1, f1
        x1, f1 = x2, f(x2)
        if abs(x1 - x0) <= tol * max(1.0, abs(x1)) or f1 == 0.0:
            return x1
    raise ConvergenceFailure(f"secant did not converge in {maxiter} steps")


def sign_changes(values) -> list:
    """Indices ``i`` with a strict sign change between ``values[i]`` and ``values[i+1]``.

    Exact zeros are attributed to the interval on their left.
    """
    idx = []
    prev_sign = 0
    prev_i = None
    for i, v in enumerate(values):
        s = (v > 0) - (v < 0)
        if s == 0:
            continue
        if prev_sign and s != prev_sign:
            idx.append(prev_i if i - prev_i > 1 else i - 1)
        prev_sign, prev_i = s, i
    return idx
