"""Tensor-product cubature on balls and spheres, and a Monte Carlo oracle.

The tensor rule is Gauss-Legendre in ``rho`` on [0, R], Gauss-Legendre in
``u = cos(phi)`` on [-1, 1] (which absorbs the ``sin(phi)`` Jacobian factor)
and the equispaced periodic rule in ``theta``. Node values are reduced with
numpy's pairwise summation over a fixed node ordering, so results do not
depend on how evaluation is split across workers.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from hhball.fields import EvaluationError, ScalarField
from hhball.geometry import Ball, ray_points


@dataclass(frozen=True)
class QuadratureSpec:
    n_rho: int = 32
    n_phi: int = 32
    n_theta: int = 64
    mc_samples: int = 1_000_000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        for name in ("n_rho", "n_phi", "n_theta"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.mc_samples < 0:
            raise ValueError("mc_samples must be nonnegative")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")
        if self.n_theta % 2:
            warnings.warn("an even n_theta is recommended", stacklevel=3)

    def halved(self) -> QuadratureSpec:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return QuadratureSpec(
                -(-self.n_rho // 2), -(-self.n_phi // 2), -(-self.n_theta // 2),
                self.mc_samples, self.seed, self.workers,
            )

    def to_dict(self) -> dict:
        return {
            "n_rho": self.n_rho,
            "n_phi": self.n_phi,
            "n_theta": self.n_theta,
            "mc_samples": self.mc_samples,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class CubatureEstimate:
    value: float
    error_estimate: float
    evaluations: int


@lru_cache(maxsize=64)
def _leggauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def gauss_legendre(n: int, lo: float = -1.0, hi: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on ``[lo, hi]``, exact to degree ``2n - 1``."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise ValueError(f"invalid interval [{lo}, {hi}]")
    x, w = _leggauss(int(n))
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def periodic_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    """``n`` equispaced azimuths on [0, 2 pi) with equal weights ``2 pi / n``."""
    return 2 * math.pi * np.arange(n) / n, np.full(n, 2 * math.pi / n)


def sphere_nodes(n_phi: int, n_theta: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Flattened ``(phi, theta, weight)`` of the unit-sphere rule; weights sum to 4 pi."""
    u, wu = gauss_legendre(n_phi, -1.0, 1.0)
    th, wt = periodic_rule(n_theta)
    phi = np.arccos(u)
    return (
        np.repeat(phi, n_theta),
        np.tile(th, n_phi),
        np.outer(wu, wt).ravel(),
    )


def ball_nodes(radius: float, n_rho: int, n_phi: int, n_theta: int):
    """Flattened ``(rho, phi, theta, weight)`` including the ``rho**2`` factor."""
    r, wr = gauss_legendre(n_rho, 0.0, radius)
    phi, th, ws = sphere_nodes(n_phi, n_theta)
    m = phi.size
    return (
        np.repeat(r, m),
        np.tile(phi, n_rho),
        np.tile(th, n_rho),
        np.outer(wr * r**2, ws).ravel(),
    )


SphericalIntegrand = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


def _evaluate(g: SphericalIntegrand, rho, phi, theta, workers: int) -> np.ndarray:
    if workers <= 1 or rho.size < 2 * workers:
        vals = np.asarray(g(rho, phi, theta), dtype=float)
    else:
        bounds = np.linspace(0, rho.size, workers + 1).astype(int)
        chunks = [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:])]
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda s: np.asarray(g(rho[s], phi[s], theta[s]), dtype=float), chunks))
        vals = np.concatenate(parts)
    return np.broadcast_to(vals, rho.shape)


def _reduce(vals: np.ndarray, weights: np.ndarray, points: Callable[[np.ndarray], np.ndarray]) -> float:
    bad = ~np.isfinite(vals)
    if np.any(bad):
        raise EvaluationError("non-finite field value at a cubature node", points(bad))
    return float(np.sum(vals * weights))


def _rule_value(g, ball: Ball, spec: QuadratureSpec, surface: bool) -> float:
    if surface:
        phi, th, w = sphere_nodes(spec.n_phi, spec.n_theta)
        rho = np.full(phi.shape, ball.radius)
        w = w * ball.radius**2
    else:
        rho, phi, th, w = ball_nodes(ball.radius, spec.n_rho, spec.n_phi, spec.n_theta)
    vals = _evaluate(g, rho, phi, th, spec.workers)

    def where(bad):
        i = int(np.argmax(bad))
        return ray_points(ball, rho[i], phi[i], th[i])

    return _reduce(vals, w, where)


def integrate_spherical(g: SphericalIntegrand, ball: Ball, spec: QuadratureSpec, surface: bool = False) -> CubatureEstimate:
    """Integrate ``g(rho, phi, theta)`` over the ball (or its bounding sphere).

    The error estimate is the difference from the same rule with half the
    nodes (rounded up) on every axis.
    """
    value = _rule_value(g, ball, spec, surface)
    coarse = _rule_value(g, ball, spec.halved(), surface)
    n = spec.n_phi * spec.n_theta * (1 if surface else spec.n_rho)
    return CubatureEstimate(value, abs(value - coarse), n)


def _on_points(f: ScalarField, ball: Ball) -> SphericalIntegrand:
    return lambda rho, phi, theta: f(ray_points(ball, rho, phi, theta))


def ball_integral(f: ScalarField, ball: Ball, spec: QuadratureSpec = QuadratureSpec()) -> CubatureEstimate:
    """Volume integral of ``f`` over the closed ball."""
    return integrate_spherical(_on_points(f, ball), ball, spec, surface=False)


def sphere_integral(f: ScalarField, ball: Ball, spec: QuadratureSpec = QuadratureSpec()) -> CubatureEstimate:
    """Surface integral of ``f`` over the sphere bounding the ball."""
    return integrate_spherical(_on_points(f, ball), ball, spec, surface=True)


# -- Monte Carlo oracle --------------------------------------------------------


def _mc(f: ScalarField, ball: Ball, spec: QuadratureSpec, surface: bool) -> CubatureEstimate:
    n = spec.mc_samples
    if n < 2:
        raise ValueError("mc_samples must be at least 2")
    rng = np.random.Generator(np.random.Philox(spec.seed))
    u, v, w = rng.random((3, n))
    rho = np.full(n, ball.radius) if surface else ball.radius * np.cbrt(u)
    phi = np.arccos(1.0 - 2.0 * v)
    theta = 2 * math.pi * w
    pts = ray_points(ball, rho, phi, theta)
    vals = f(pts)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        raise EvaluationError("non-finite field value at a Monte Carlo sample", pts[int(np.argmax(bad))])
    measure = ball.area if surface else ball.volume
    mean = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1)) / math.sqrt(n)
    return CubatureEstimate(measure * mean, measure * stderr, n)


def mc_ball_integral(f: ScalarField, ball: Ball, spec: QuadratureSpec = QuadratureSpec()) -> CubatureEstimate:
    """Plain Monte Carlo estimate of the volume integral; error is one standard error."""
    return _mc(f, ball, spec, surface=False)


def mc_sphere_integral(f: ScalarField, ball: Ball, spec: QuadratureSpec = QuadratureSpec()) -> CubatureEstimate:
    return _mc(f, ball, spec, surface=True)


def agrees(tensor: CubatureEstimate, mc: CubatureEstimate, k: float = 4.0) -> bool:
    """Whether the two estimates differ by at most ``k`` combined error estimates.

    A few ulps of slack cover integrands both methods resolve exactly.
    """
    slack = 1e-12 * max(abs(tensor.value), abs(mc.value), 1e-300)
    return abs(tensor.value - mc.value) <= k * (tensor.error_estimate + mc.error_estimate) + slack
