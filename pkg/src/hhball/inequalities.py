"""Both sides of the ball Hermite-Hadamard chain and its trapezoid/midpoint bounds.

All checks for one ``(field, ball, spec)`` share a single :class:`MeansSummary`
so that related reports are computed from identical numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from hhball.fields import (
    ConvexityCertificate,
    EvaluationError,
    ScalarField,
    convexity_sample,
    fd_step,
    radial_abs_field,
    radial_derivative,
)
from hhball.geometry import Ball, ray_points
from hhball.quadrature import (
    CubatureEstimate,
    QuadratureSpec,
    ball_integral,
    gauss_legendre,
    integrate_spherical,
    sphere_integral,
    sphere_nodes,
)

EPS = float(np.finfo(float).eps)
ALL_CHECKS = ("hh", "trapezoid", "midpoint", "surface_center", "ray_identities")


@dataclass(frozen=True)
class MeansSummary:
    volume_mean: float
    surface_mean: float
    center_value: float
    radial_abs_surface_integral: float
    error_estimates: dict
    volume_estimate: Optional[CubatureEstimate] = None
    surface_estimate: Optional[CubatureEstimate] = None

    @property
    def surface_integral(self) -> float:
        return math.nan if self.surface_estimate is None else self.surface_estimate.value

    def to_dict(self) -> dict:
        return {
            "volume_mean": self.volume_mean,
            "surface_mean": self.surface_mean,
            "center_value": self.center_value,
            "radial_abs_surface_integral": self.radial_abs_surface_integral,
            "error_estimates": dict(self.error_estimates),
        }


@dataclass(frozen=True)
class InequalityReport:
    name: str
    lhs: float
    rhs: float
    tolerance: float
    hypothesis_certificates: tuple = ()
    margin: float = field(init=False)
    holds: bool = field(init=False)

    def __post_init__(self):
        margin = self.rhs - self.lhs
        object.__setattr__(self, "margin", margin)
        object.__setattr__(self, "holds", bool(margin >= -self.tolerance))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "holds": self.holds,
            "tolerance": self.tolerance,
        }


def _radial_abs_integral(f: ScalarField, ball: Ball, spec: QuadratureSpec) -> CubatureEstimate:
    est = integrate_spherical(
        lambda rho, phi, theta: np.abs(radial_derivative(f, ball, rho, phi, theta)),
        ball, spec, surface=True,
    )
    if f.grad is None:
        # finite-difference roundoff, not seen by the refinement estimate
        phi, theta, _ = sphere_nodes(spec.n_phi, spec.n_theta)
        fmax = float(np.max(np.abs(f(ray_points(ball, ball.radius, phi, theta)))))
        fd_err = float(ball.area * 4 * EPS * max(fmax, 1.0) / fd_step(ball))
        est = CubatureEstimate(est.value, est.error_estimate + fd_err, est.evaluations)
    return est


def means(f: ScalarField, ball: Ball, spec: QuadratureSpec = QuadratureSpec()) -> MeansSummary:
    """Center value, volume and surface means of ``f`` and the surface integral of ``|df/drho|``."""
    vol = ball_integral(f, ball, spec)
    surf = sphere_integral(f, ball, spec)
    rad = _radial_abs_integral(f, ball, spec)
    center = float(f(np.asarray(ball.center)))
    if not math.isfinite(center):
        raise EvaluationError("non-finite field value at the center", ball.center)
    return MeansSummary(
        volume_mean=vol.value / ball.volume,
        surface_mean=surf.value / ball.area,
        center_value=center,
        radial_abs_surface_integral=rad.value,
        error_estimates={
            "volume_mean": vol.error_estimate / ball.volume,
            "surface_mean": surf.error_estimate / ball.area,
            "center_value": 0.0,
            "radial_abs_surface_integral": rad.error_estimate,
        },
        volume_estimate=vol,
        surface_estimate=surf,
    )


def _tolerance(tol: Optional[float], err: float, lhs: float, rhs: float) -> float:
    if tol is not None:
        return float(tol)
    # 10x the propagated cubature error, floored at a few ulps of the operands
    return 10.0 * err + 1e-12 * max(1.0, abs(lhs), abs(rhs))


def function_certificate(f: ScalarField, ball: Ball, spec: QuadratureSpec, n: int = 10_000) -> ConvexityCertificate:
    return convexity_sample(f, ball, n, spec.seed, target="f")


def radial_certificate(f: ScalarField, ball: Ball, spec: QuadratureSpec, n: int = 10_000) -> ConvexityCertificate:
    """Sampled convexity of ``|df/drho|`` on the ball; the center is excluded."""
    return convexity_sample(radial_abs_field(f, ball), ball, n, spec.seed, target="|df/drho|")


def check_hh_chain(
    f: ScalarField,
    ball: Ball,
    spec: QuadratureSpec = QuadratureSpec(),
    tol: Optional[float] = None,
    *,
    summary: Optional[MeansSummary] = None,
    certificate: Optional[ConvexityCertificate] = None,
) -> tuple[InequalityReport, InequalityReport]:
    """``f(C) <= volume mean`` and ``volume mean <= surface mean`` for convex ``f``."""
    s = summary or means(f, ball, spec)
    cert = certificate or function_certificate(f, ball, spec)
    e = s.error_estimates
    lower = InequalityReport(
        "hh_lower", s.center_value, s.volume_mean,
        _tolerance(tol, e["volume_mean"], s.center_value, s.volume_mean), (cert,),
    )
    upper = InequalityReport(
        "hh_upper", s.volume_mean, s.surface_mean,
        _tolerance(tol, e["volume_mean"] + e["surface_mean"], s.volume_mean, s.surface_mean), (cert,),
    )
    return lower, upper


def check_trapezoid(
    f: ScalarField,
    ball: Ball,
    spec: QuadratureSpec = QuadratureSpec(),
    tol: Optional[float] = None,
    *,
    summary: Optional[MeansSummary] = None,
    certificate: Optional[ConvexityCertificate] = None,
) -> InequalityReport:
    """``|surface mean - volume mean| <= (1 / (16 pi R)) * integral of |df/drho| over the sphere``.

    Equality holds for the cone ``R - |p - C|``.
    """
    s = summary or means(f, ball, spec)
    cert = certificate or radial_certificate(f, ball, spec)
    e = s.error_estimates
    c = 1.0 / (16 * math.pi * ball.radius)
    lhs = abs(s.surface_mean - s.volume_mean)
    rhs = c * s.radial_abs_surface_integral
    err = e["surface_mean"] + e["volume_mean"] + c * e["radial_abs_surface_integral"]
    return InequalityReport("trapezoid", lhs, rhs, _tolerance(tol, err, lhs, rhs), (cert,))


def check_midpoint(
    f: ScalarField,
    ball: Ball,
    spec: QuadratureSpec = QuadratureSpec(),
    tol: Optional[float] = None,
    *,
    summary: Optional[MeansSummary] = None,
    certificate: Optional[ConvexityCertificate] = None,
) -> InequalityReport:
    """``|volume mean - f(C)| <= (5 / (16 pi R)) * integral of |df/drho| over the sphere``."""
    s = summary or means(f, ball, spec)
    cert = certificate or radial_certificate(f, ball, spec)
    e = s.error_estimates
    c = 5.0 / (16 * math.pi * ball.radius)
    lhs = abs(s.volume_mean - s.center_value)
    rhs = c * s.radial_abs_surface_integral
    err = e["volume_mean"] + c * e["radial_abs_surface_integral"]
    return InequalityReport("midpoint", lhs, rhs, _tolerance(tol, err, lhs, rhs), (cert,))


def center_radial_derivative(f: ScalarField, ball: Ball, spec: QuadratureSpec) -> float:
    """Largest ``|df/drho|`` at the center over the sphere rule's ray directions.

    Each direction uses a one-sided difference along its own ray, which is
    well defined even where ``f`` has a kink at the center. Where an analytic
    gradient exists and agrees with that difference, the gradient value is
    used instead.
    """
    phi, theta, _ = sphere_nodes(spec.n_phi, spec.n_theta)
    rho = np.zeros(phi.shape)
    d = radial_derivative(f, ball, rho, phi, theta, one_sided=True)
    if f.grad is not None:
        a = radial_derivative(f, ball, rho, phi, theta)
        close = np.abs(a - d) <= 1e-6 * np.maximum(np.abs(a), np.abs(d))
        d = np.where(close, a, d)
    return float(np.max(np.abs(d)))


def check_surface_center(
    f: ScalarField,
    ball: Ball,
    spec: QuadratureSpec = QuadratureSpec(),
    tol: Optional[float] = None,
    *,
    summary: Optional[MeansSummary] = None,
    certificate: Optional[ConvexityCertificate] = None,
) -> InequalityReport:
    """``|surface mean - f(C)| <= (R/2) D0 + (1 / (8 pi R)) * integral of |df/drho|``.

    ``D0`` is the center radial derivative from :func:`center_radial_derivative`.
    """
    s = summary or means(f, ball, spec)
    cert = certificate or radial_certificate(f, ball, spec)
    e = s.error_estimates
    R = ball.radius
    d0 = center_radial_derivative(f, ball, spec)
    c = 1.0 / (8 * math.pi * R)
    lhs = abs(s.surface_mean - s.center_value)
    rhs = 0.5 * R * d0 + c * s.radial_abs_surface_integral
    err = e["surface_mean"] + c * e["radial_abs_surface_integral"]
    # D0 always comes from a finite difference
    err += 0.5 * R * 4 * EPS * max(1.0, abs(s.center_value)) / fd_step(ball)
    return InequalityReport("surface_center", lhs, rhs, _tolerance(tol, err, lhs, rhs), (cert,))


# -- per-ray identities --------------------------------------------------------


def _ray(f: ScalarField, ball: Ball, phi: float, theta: float, n: int):
    r, w = gauss_legendre(n, 0.0, ball.radius)
    fr = f(ray_points(ball, r, phi, theta))
    dr = radial_derivative(f, ball, r, phi, theta)
    f_surface = float(f(ray_points(ball, ball.radius, phi, theta)))
    return r, w, fr, dr, f_surface


def per_ray_parts_identity(f: ScalarField, ball: Ball, phi: float, theta: float, n: int = 32) -> tuple[float, float]:
    """Integration by parts along one ray, weighted by ``rho**3 sin(phi)``.

    Returns ``(integral of df/drho rho^3 sin(phi), R^3 f(surface) sin(phi) - 3 integral of f rho^2 sin(phi))``.
    """
    r, w, fr, dr, fs = _ray(f, ball, phi, theta, n)
    s = math.sin(phi)
    R = ball.radius
    lhs = float(np.sum(w * dr * r**3)) * s
    rhs = R**3 * fs * s - 3.0 * float(np.sum(w * fr * r**2)) * s
    return lhs, rhs


def per_ray_ftc_identity(f: ScalarField, ball: Ball, phi: float, theta: float, n: int = 32) -> tuple[float, float]:
    """Fundamental theorem of calculus along one ray, weighted by ``sin(phi)``."""
    r, w, fr, dr, fs = _ray(f, ball, phi, theta, n)
    s = math.sin(phi)
    lhs = float(np.sum(w * dr)) * s
    rhs = (fs - float(f(np.asarray(ball.center)))) * s
    return lhs, rhs


def random_rays(seed: int, count: int) -> tuple[np.ndarray, np.ndarray]:
    """``count`` directions uniform on the sphere, as ``(phi, theta)`` arrays."""
    rng = np.random.Generator(np.random.Philox(seed))
    v, w = rng.random((2, count))
    return np.arccos(1.0 - 2.0 * v), 2 * math.pi * w


def check_ray_identities(
    f: ScalarField,
    ball: Ball,
    spec: QuadratureSpec = QuadratureSpec(),
    tol: Optional[float] = None,
    rays: int = 100,
    n: int = 32,
) -> tuple[InequalityReport, InequalityReport]:
    """Worst relative discrepancy of both per-ray identities over seeded random rays.

    Each report has ``lhs`` equal to ``max |lhs - rhs| / (1 + |rhs|)`` and
    ``rhs = 0``; the default tolerance is ``1e-9``.
    """
    phis, thetas = random_rays(spec.seed, rays)
    out = []
    for name, identity in (("ray_parts_identity", per_ray_parts_identity), ("ray_ftc_identity", per_ray_ftc_identity)):
        worst = 0.0
        for phi, theta in zip(phis, thetas):
            a, b = identity(f, ball, float(phi), float(theta), n)
            worst = max(worst, abs(a - b) / (1.0 + abs(b)))
        out.append(InequalityReport(name, worst, 0.0, 1e-9 if tol is None else float(tol)))
    return tuple(out)


# -- orchestration -------------------------------------------------------------


@dataclass
class Verification:
    summary: MeansSummary
    reports: list
    certificates: list

    @property
    def all_hold(self) -> bool:
        return all(r.holds for r in self.reports)


def normalize_checks(checks: Iterable[str]) -> list[str]:
    names = []
    for c in checks:
        c = c.strip()
        if c == "all":
            names.extend(ALL_CHECKS)
        elif c in ALL_CHECKS:
            names.append(c)
        else:
            raise ValueError(f"unknown check {c!r}; expected a subset of {', '.join(ALL_CHECKS + ('all',))}")
    if not names:
        raise ValueError("at least one check is required")
    return [c for c in ALL_CHECKS if c in names]


def verify(
    f: ScalarField,
    ball: Ball,
    spec: QuadratureSpec = QuadratureSpec(),
    checks: Iterable[str] = ("all",),
    tol: Optional[float] = None,
    certificate_samples: int = 10_000,
) -> Verification:
    """Run the requested checks, sharing one summary and one set of certificates."""
    names = normalize_checks(checks)
    s = means(f, ball, spec)
    certs = {}

    def cert(kind):
        if kind not in certs:
            make = function_certificate if kind == "f" else radial_certificate
            certs[kind] = make(f, ball, spec, certificate_samples)
        return certs[kind]

    reports = []
    for name in names:
        if name == "hh":
            reports.extend(check_hh_chain(f, ball, spec, tol, summary=s, certificate=cert("f")))
        elif name == "ray_identities":
            reports.extend(check_ray_identities(f, ball, spec, tol))
        else:
            check = {"trapezoid": check_trapezoid, "midpoint": check_midpoint, "surface_center": check_surface_center}[name]
            reports.append(check(f, ball, spec, tol, summary=s, certificate=cert("radial")))
    return Verification(s, reports, list(certs.values()))
