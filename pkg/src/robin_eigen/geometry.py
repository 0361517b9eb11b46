"""Balls, spherical shells and planar radii maps."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = [
    "ShellGeometry",
    "PlanarSummary",
    "unit_ball_volume",
    "volume",
    "surface",
    "match_shell_to_ball",
    "radii_from_summary",
    "disk_radius_from_area",
]


def unit_ball_volume(d: int) -> float:
    """Volume of the unit ball in R^d, via omega_d = (2 pi / d) omega_{d-2}."""
    if d < 0:
        raise DomainError(f"dimension must be >= 0, got {d}")
    omega = 1.0 if d % 2 == 0 else 2.0
    for m in range(2 + d % 2, d + 1, 2):
        omega *= 2.0 * math.pi / m
    return omega


@dataclass(frozen=True)
class ShellGeometry:
    """Shell ``r1 < |x| < r2`` in R^d; ``r1 == 0`` is the ball of radius ``r2``."""

    d: int
    r1: float
    r2: float

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 2:
            raise DomainError(f"dimension must be an integer >= 2, got {self.d}")
        if not (math.isfinite(self.r1) and math.isfinite(self.r2)):
            raise DomainError("radii must be finite")
        if self.r1 < 0 or not self.r2 > self.r1:
            raise DomainError(f"need 0 <= r1 < r2, got r1={self.r1}, r2={self.r2}")

    @classmethod
    def ball(cls, d: int, r: float) -> "ShellGeometry":
        return cls(d, 0.0, r)

    @property
    def is_ball(self) -> bool:
        return self.r1 == 0.0

    @property
    def nu(self) -> float:
        return 0.5 * (self.d - 2)


@dataclass(frozen=True)
class PlanarSummary:
    """Outer perimeter and area of a planar domain."""

    outer_perimeter: float
    area: float

    def __post_init__(self):
        if not (self.outer_perimeter > 0 and self.area > 0):
            raise DomainError("perimeter and area must be positive")


def volume(g: ShellGeometry) -> float:
    return unit_ball_volume(g.d) * (g.r2 ** g.d - g.r1 ** g.d)


def surface(g: ShellGeometry, inner: bool = True) -> float:
    """Boundary measure; ``inner=False`` drops the inner sphere (Neumann face)."""
    s = g.r2 ** (g.d - 1)
    if inner and g.r1 > 0:
        s += g.r1 ** (g.d - 1)
    return g.d * unit_ball_volume(g.d) * s


def match_shell_to_ball(d: int, r_ball: float, r1: float) -> ShellGeometry:
    """Shell with inner radius ``r1`` and the same volume as the ball of radius ``r_ball``."""
    if not (r_ball > 0 and r1 > 0):
        raise DomainError(f"need r_ball > 0 and r1 > 0, got {r_ball}, {r1}")
    r2 = (r1 ** d + r_ball ** d) ** (1.0 / d)
    if r2 <= r_ball:
        # r1^d vanished against r_ball^d; the true r2 still lies strictly above
        r2 = math.nextafter(r_ball, math.inf)
    return ShellGeometry(d, float(r1), r2)


def radii_from_summary(s: PlanarSummary):
    """Annulus radii (r1, r2) with outer perimeter L0 and area A0.

    ``r1 = sqrt(L0^2 - 4 pi A0) / (2 pi)`` and ``r2 = L0 / (2 pi)``. The disk
    (equality in the isoperimetric inequality) maps to ``r1 = 0`` exactly.
    """
    deficit = s.outer_perimeter ** 2 - 4.0 * math.pi * s.area
    if deficit < 0:
        # tolerate rounding of an exact disk
        if deficit > -1e-12 * s.outer_perimeter ** 2:
            deficit = 0.0
        else:
            raise DomainError("isoperimetric inequality L0^2 >= 4 pi A0 violated")
    return math.sqrt(deficit) / (2.0 * math.pi), s.outer_perimeter / (2.0 * math.pi)


def disk_radius_from_area(area: float) -> float:
    if not area > 0:
        raise DomainError(f"area must be positive, got {area}")
    return math.sqrt(area / math.pi)
