"""Numerical verification of Hermite-Hadamard type inequalities on balls in R^3."""

from hhball.geometry import Ball, SphericalCoord, to_cartesian, volume_element
from hhball.fields import (
    ConvexityCertificate,
    EvaluationError,
    ScalarField,
    catalog,
    convexity_sample,
    radial_derivative,
)
from hhball.expr import parse, to_field
from hhball.quadrature import (
    CubatureEstimate,
    QuadratureSpec,
    ball_integral,
    gauss_legendre,
    mc_ball_integral,
    mc_sphere_integral,
    sphere_integral,
)
from hhball.inequalities import (
    InequalityReport,
    MeansSummary,
    check_hh_chain,
    check_midpoint,
    check_surface_center,
    check_trapezoid,
    means,
    per_ray_ftc_identity,
    per_ray_parts_identity,
    verify,
)

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "ConvexityCertificate",
    "CubatureEstimate",
    "EvaluationError",
    "InequalityReport",
    "MeansSummary",
    "QuadratureSpec",
    "ScalarField",
    "SphericalCoord",
    "ball_integral",
    "catalog",
    "check_hh_chain",
    "check_midpoint",
    "check_surface_center",
    "check_trapezoid",
    "convexity_sample",
    "gauss_legendre",
    "mc_ball_integral",
    "mc_sphere_integral",
    "means",
    "parse",
    "per_ray_ftc_identity",
    "per_ray_parts_identity",
    "radial_derivative",
    "sphere_integral",
    "to_cartesian",
    "to_field",
    "verify",
    "volume_element",
]
