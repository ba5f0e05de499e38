"""Closed balls in R^3 and their spherical parametrization.

Points are written as ``center + rho * (cos(theta) sin(phi), sin(theta) sin(phi), cos(phi))``
with ``phi`` the polar angle in [0, pi] and ``theta`` the azimuth in [0, 2 pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np


@dataclass(frozen=True)
class Ball:
    """The closed ball of radius ``radius`` around ``center``."""

    center: tuple[float, float, float]
    radius: float

    def __post_init__(self):
        center = tuple(float(c) for c in self.center)
        if len(center) != 3:
            raise ValueError(f"center must have 3 coordinates, got {len(center)}")
        if not all(math.isfinite(c) for c in center):
            raise ValueError("center coordinates must be finite")
        radius = float(self.radius)
        if not math.isfinite(radius):
            raise ValueError("radius must be finite")
        if radius <= 0:
            raise ValueError("radius must be positive")
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", radius)

    @property
    def volume(self) -> float:
        return 4.0 / 3.0 * math.pi * self.radius**3

    @property
    def area(self) -> float:
        return 4.0 * math.pi * self.radius**2

    def shifted(self, v) -> Ball:
        return Ball(tuple(c + float(d) for c, d in zip(self.center, v)), self.radius)


class SphericalCoord(NamedTuple):
    rho: float
    phi: float
    theta: float


def unit_direction(phi, theta) -> np.ndarray:
    """Unit ray direction(s) for polar angle ``phi`` and azimuth ``theta``; shape (..., 3)."""
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    sin_phi = np.sin(phi)
    return np.stack(
        np.broadcast_arrays(np.cos(theta) * sin_phi, np.sin(theta) * sin_phi, np.cos(phi)),
        axis=-1,
    )


def ray_points(ball: Ball, rho, phi, theta) -> np.ndarray:
    # Unchecked variant of to_cartesian for internal vectorized use.
    rho = np.asarray(rho, dtype=float)
    return np.asarray(ball.center) + rho[..., None] * unit_direction(phi, theta)


def to_cartesian(ball: Ball, rho, phi, theta) -> np.ndarray:
    """Map spherical coordinates relative to ``ball`` to Cartesian points.

    Accepts scalars or broadcastable arrays and returns an array of shape
    ``(..., 3)``. Raises ``ValueError`` if ``rho`` leaves ``[0, R]`` or ``phi``
    leaves ``[0, pi]``. ``theta`` is periodic and is not range-checked.
    """
    rho_a = np.asarray(rho, dtype=float)
    phi_a = np.asarray(phi, dtype=float)
    if np.any(~np.isfinite(rho_a)) or np.any(rho_a < 0) or np.any(rho_a > ball.radius):
        raise ValueError(f"rho must lie in [0, {ball.radius}]")
    if np.any(~np.isfinite(phi_a)) or np.any(phi_a < 0) or np.any(phi_a > math.pi):
        raise ValueError("phi must lie in [0, pi]")
    return ray_points(ball, rho_a, phi_a, theta)


def to_spherical(ball: Ball, points) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Inverse of :func:`to_cartesian`; the center maps to ``(0, 0, 0)``."""
    d = np.asarray(points, dtype=float) - np.asarray(ball.center)
    rho = np.linalg.norm(d, axis=-1)
    phi = np.arctan2(np.hypot(d[..., 0], d[..., 1]), d[..., 2])
    theta = np.mod(np.arctan2(d[..., 1], d[..., 0]), 2 * math.pi)
    return rho, phi, theta


def volume_element(rho, phi, theta=None):
    """Spherical volume element ``rho**2 * sin(phi)``; ``theta`` is accepted and ignored."""
    return np.asarray(rho, dtype=float) ** 2 * np.sin(np.asarray(phi, dtype=float))
