"""Finite-volume eigensolver for the radial problem, independent of Bessel functions.

Discretises the weighted Rayleigh quotient

    (int psi'^2 r^{d-1} dr + boundary terms) / int psi^2 r^{d-1} dr

on a cell-centred grid, giving a symmetric tridiagonal pencil ``(A, M)`` with
diagonal ``M``. The smallest eigenvalue comes from bisection on Sturm sequence
counts of ``M^{-1/2} A M^{-1/2}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, DomainError
from .secular import Boundary, SecularProblem

__all__ = ["RadialGrid", "radial_grid", "assemble", "fd_lambda1", "richardson", "sturm_count"]

MIN_NODES = 64


@dataclass(frozen=True)
class RadialGrid:
    n: int
    nodes: np.ndarray
    faces: np.ndarray
    spacing: float


def radial_grid(r1: float, r2: float, n: int) -> RadialGrid:
    """Cell centres on ``[r1, r2]``; for a ball (``r1 = 0``) the first node is ``h/2``."""
    if n < MIN_NODES:
        raise DomainError(f"need at least {MIN_NODES} nodes, got {n}")
    h = (r2 - r1) / n
    faces = r1 + h * np.arange(n + 1)
    faces[-1] = r2
    nodes = r1 + h * (np.arange(n) + 0.5)
    return RadialGrid(n, nodes, faces, h)


def assemble(p: SecularProblem, n: int):
    """Return ``(diag, off, grid)`` of the symmetrised tridiagonal operator.

    Robin faces use ghost-node elimination ``psi_face = psi_cell / (1 + alpha h / 2)``,
    which keeps the pencil symmetric. The origin face of a ball has zero
    weight, so regularity there needs no special stencil.
    """
    g = p.geometry
    grid = radial_grid(g.r1, g.r2, n)
    h = grid.spacing
    d = g.d
    alpha = p.alpha
    if 1.0 + 0.5 * alpha * h <= 0.0:
        raise DomainError(f"grid too coarse for alpha={alpha}: need h < 2/|alpha|")

    w_face = grid.faces ** (d - 1)
    mass = (grid.faces[1:] ** d - grid.faces[:-1] ** d) / d

    flux = w_face[1:-1] / h
    a_diag = np.zeros(n)
    a_diag[:-1] += flux
    a_diag[1:] += flux
    a_off = -flux

    robin = alpha / (1.0 + 0.5 * alpha * h)
    a_diag[-1] += robin * w_face[-1]
    if p.inner_bc is Boundary.ROBIN:
        a_diag[0] += robin * w_face[0]

    s = 1.0 / np.sqrt(mass)
    return a_diag * s * s, a_off * s[:-1] * s[1:], grid


def sturm_count(diag: np.ndarray, off: np.ndarray, shifts: np.ndarray) -> np.ndarray:
    """Number of eigenvalues strictly below each shift (Sturm sequence / LDL^T inertia)."""
    off2 = off * off
    shifts = np.asarray(shifts, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        q = diag[0] - shifts
        count = (q < 0).astype(np.int64)
        for i in range(1, diag.size):
            # a zero pivot yields -inf, which the IEEE recurrence absorbs
            q = (diag[i] - shifts) - off2[i - 1] / q
            count += q < 0
    return count


def _smallest_eigenvalue(diag, off, upper, rtol=1e-14, probes=63, maxit=40):
    """Multisection on Sturm counts for the smallest eigenvalue."""
    lo = float(np.min(diag - np.abs(np.r_[0.0, off]) - np.abs(np.r_[off, 0.0])))
    hi = float(upper)
    if sturm_count(diag, off, np.array([hi]))[0] < 1:
        hi = float(np.max(diag + np.abs(np.r_[0.0, off]) + np.abs(np.r_[off, 0.0])))
    for _ in range(maxit):
        if hi - lo <= rtol * max(1.0, abs(lo), abs(hi)):
            return 0.5 * (lo + hi)
        shifts = np.linspace(lo, hi, probes + 2)[1:-1]
        counts = sturm_count(diag, off, shifts)
        above = np.nonzero(counts >= 1)[0]
        if above.size:
            j = above[0]
            hi = shifts[j]
            if j > 0:
                lo = shifts[j - 1]
        else:
            lo = shifts[-1]
    raise ConvergenceFailure("Sturm multisection did not converge")


def fd_lambda1(p: SecularProblem, n: int) -> float:
    """Smallest eigenvalue of the ``n``-cell discretisation of ``p``."""
    diag, off, grid = assemble(p, n)
    # constant vector Rayleigh quotient: an upper bound for the smallest eigenvalue
    ones = np.sqrt((grid.faces[1:] ** p.geometry.d - grid.faces[:-1] ** p.geometry.d) / p.geometry.d)
    rq = (ones @ (diag * ones) + 2.0 * ones[:-1] @ (off * ones[1:])) / (ones @ ones)
    return _smallest_eigenvalue(diag, off, rq + 1e-12 * max(1.0, abs(rq)))


def richardson(lambda_n: float, lambda_2n: float) -> float:
    """Second-order Richardson extrapolation from grids ``n`` and ``2n``."""
    return (4.0 * lambda_2n - lambda_n) / 3.0


def observed_order(lambda_n: float, lambda_2n: float, lambda_4n: float) -> float:
    """Convergence order estimated from three successively halved grids."""
    return math.log2(abs(lambda_n - lambda_2n) / abs(lambda_2n - lambda_4n))
