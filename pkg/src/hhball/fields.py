"""Scalar fields on R^3, radial derivatives and sampled convexity certificates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from hhball.geometry import Ball, ray_points, to_spherical, unit_direction

ArrayFn = Callable[[np.ndarray], np.ndarray]


class EvaluationError(ArithmeticError):
    """A field could not be evaluated; ``point`` is the offending Cartesian point."""

    def __init__(self, message: str, point=None):
        self.point = None if point is None else tuple(float(c) for c in np.ravel(point))
        if self.point is not None:
            message = f"{message} at point ({', '.join(f'{c:.17g}' for c in self.point)})"
        super().__init__(message)


@dataclass(frozen=True)
class ScalarField:
    """A real function of a point in R^3.

    ``func`` is vectorized: it receives an array of shape ``(..., 3)`` and
    returns an array of shape ``(...)``. ``grad``, when given, returns shape
    ``(..., 3)``. Both must be free of side effects so that concurrent
    evaluation is safe.
    """

    func: ArrayFn
    name: str = "f"
    grad: Optional[ArrayFn] = None

    def __call__(self, points) -> np.ndarray:
        p = np.asarray(points, dtype=float)
        if p.shape[-1:] != (3,):
            raise ValueError(f"points must have trailing dimension 3, got shape {p.shape}")
        return np.asarray(self.func(p), dtype=float)

    def gradient(self, points) -> np.ndarray:
        if self.grad is None:
            raise AttributeError(f"field {self.name!r} has no analytic gradient")
        return np.asarray(self.grad(np.asarray(points, dtype=float)), dtype=float)

    def scaled(self, lam: float) -> ScalarField:
        lam = float(lam)
        grad = None if self.grad is None else (lambda p, g=self.grad: lam * g(p))
        return ScalarField(lambda p, f=self.func: lam * f(p), f"{lam!r}*({self.name})", grad)

    def translated(self, v) -> ScalarField:
        """The field ``p -> f(p - v)``, i.e. ``f`` moved along with a ball shifted by ``v``."""
        v = np.asarray(v, dtype=float)
        grad = None if self.grad is None else (lambda p, g=self.grad: g(p - v))
        return ScalarField(lambda p, f=self.func: f(p - v), f"{self.name} shifted", grad)


def fd_step(ball: Ball) -> float:
    return 1e-5 * max(1.0, ball.radius)


def _ray_fd(f: ScalarField, ball: Ball, rho, phi, theta) -> np.ndarray:
    # Second-order stencils: central inside, one-sided where the central
    # stencil would leave [0, R].
    h = fd_step(ball)
    rho, phi, theta = np.broadcast_arrays(
        np.asarray(rho, float), np.asarray(phi, float), np.asarray(theta, float)
    )
    out = np.empty(rho.shape)
    fwd = rho - h < 0
    bwd = ~fwd & (rho + h > ball.radius)
    ctr = ~(fwd | bwd)

    def at(mask, offset):
        return f(ray_points(ball, rho[mask] + offset, phi[mask], theta[mask]))

    if ctr.any():
        out[ctr] = (at(ctr, h) - at(ctr, -h)) / (2 * h)
    if fwd.any():
        out[fwd] = (-3 * at(fwd, 0.0) + 4 * at(fwd, h) - at(fwd, 2 * h)) / (2 * h)
    if bwd.any():
        out[bwd] = (3 * at(bwd, 0.0) - 4 * at(bwd, -h) + at(bwd, -2 * h)) / (2 * h)
    return out


def radial_derivative(f: ScalarField, ball: Ball, rho, phi, theta, *, one_sided: bool = False):
    """Derivative of ``t -> f(center + t * u(phi, theta))`` at ``t = rho``.

    Uses the analytic gradient when ``f`` has one, otherwise (or where the
    gradient is not finite, e.g. at a kink) a finite difference with step
    ``1e-5 * max(1, R)``. ``one_sided=True`` forces the finite difference,
    which at ``rho = 0`` gives the derivative along the given ray only.
    """
    rho_a = np.asarray(rho, dtype=float)
    if np.any(rho_a < 0) or np.any(rho_a > ball.radius):
        raise ValueError(f"rho must lie in [0, {ball.radius}]")
    if f.grad is None or one_sided:
        return _ray_fd(f, ball, rho_a, phi, theta)
    u = unit_direction(phi, theta)
    p = np.asarray(ball.center) + rho_a[..., None] * u
    d = np.sum(f.gradient(p) * u, axis=-1)
    bad = ~np.isfinite(d)
    if np.any(bad):
        rho_b, phi_b, theta_b = np.broadcast_arrays(rho_a, np.asarray(phi, float), np.asarray(theta, float))
        d = np.array(d, dtype=float)
        d[bad] = _ray_fd(f, ball, rho_b[bad], phi_b[bad], theta_b[bad])
    return d


def radial_abs_field(f: ScalarField, ball: Ball) -> ScalarField:
    """The composite ``p -> |df/drho|(p)`` along rays from the ball's center.

    Undefined (NaN) at the center itself.
    """

    def g(p):
        rho, phi, theta = to_spherical(ball, p)
        rho = np.minimum(rho, ball.radius)
        out = np.abs(radial_derivative(f, ball, rho, phi, theta))
        return np.where(rho > 0, out, np.nan)

    return ScalarField(g, f"|d({f.name})/drho|")


@dataclass(frozen=True)
class ConvexityCertificate:
    target: str
    samples_tested: int
    max_violation: float
    tolerance: float
    passed: bool
    counterexample: Optional[tuple[tuple[float, ...], tuple[float, ...], float]] = None
    excluded: int = 0

    def to_dict(self) -> dict:
        return {"target": self.target, "passed": self.passed, "max_violation": self.max_violation}


def sample_ball(ball: Ball, rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` points uniformly distributed in ``ball``."""
    u, v, w = rng.random((3, n))
    rho = ball.radius * np.cbrt(u)
    phi = np.arccos(1.0 - 2.0 * v)
    return ray_points(ball, rho, phi, 2 * math.pi * w)


def convexity_sample(
    f: ScalarField, ball: Ball, n: int = 10_000, seed: int = 0, target: Optional[str] = None
) -> ConvexityCertificate:
    """Sample the convexity inequality of ``f`` on random chords of ``ball``.

    Draws ``n`` pairs of points uniformly in the ball and a mixing weight
    ``lam`` uniform in [0, 1] per pair. Samples where ``f`` is undefined
    (NaN, e.g. a radial derivative at the center) are dropped and counted in
    ``excluded``. The draw uses a counter-based Philox stream, so the
    certificate depends only on ``(n, seed)``.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.Generator(np.random.Philox(seed))
    x = sample_ball(ball, rng, n)
    y = sample_ball(ball, rng, n)
    lam = rng.random(n)
    mid = lam[:, None] * x + (1.0 - lam[:, None]) * y
    fx, fy, fm = f(x), f(y), f(mid)
    gap = fm - lam * fx - (1.0 - lam) * fy
    ok = np.isfinite(gap)
    tested = int(ok.sum())
    target = f.name if target is None else target
    if tested == 0:
        return ConvexityCertificate(target, 0, 0.0, 0.0, False, excluded=n)
    scale = max(np.max(np.abs(fx[ok])), np.max(np.abs(fy[ok])), np.max(np.abs(fm[ok])))
    tol = 1e-10 * (1.0 + float(scale))
    gap = np.where(ok, gap, -np.inf)
    worst = int(np.argmax(gap))
    max_violation = max(0.0, float(gap[worst]))
    passed = max_violation <= tol
    counterexample = None
    if not passed:
        counterexample = (tuple(x[worst].tolist()), tuple(y[worst].tolist()), float(lam[worst]))
    return ConvexityCertificate(target, tested, max_violation, tol, passed, counterexample, n - tested)


# -- catalog -----------------------------------------------------------------

CATALOG_ARITY = {
    "constant": "1",
    "affine": "4 (g1,g2,g3,c)",
    "coordinate": "1 (axis index 0, 1 or 2)",
    "quadratic-psd": "9 (symmetric PSD matrix, row-major)",
    "max-affine": "4k, k >= 1 (rows g1,g2,g3,c)",
    "exp-affine": "4 (g1,g2,g3,c)",
    "norm-squared": "3 (center), or 0 to use the ball center",
    "sharpness-cone": "4 (center, R), or 0 to bind to the ball",
}


def _need(name: str, params: Sequence[float], k: int):
    if len(params) != k:
        raise ValueError(f"{name} takes {CATALOG_ARITY[name]} parameters, got {len(params)}")


def catalog(name: str, params: Sequence[float] = (), ball: Optional[Ball] = None) -> ScalarField:
    """Build a named field from the built-in catalog.

    ``norm-squared`` and ``sharpness-cone`` take their center (and radius)
    from ``ball`` when ``params`` is empty.
    """
    params = [float(p) for p in params]
    label = f"{name}[{','.join(repr(p) for p in params)}]" if params else name

    if name == "constant":
        _need(name, params, 1)
        c = params[0]
        return ScalarField(lambda p: np.full(p.shape[:-1], c), label, lambda p: np.zeros(p.shape))

    if name in ("affine", "exp-affine"):
        _need(name, params, 4)
        g = np.array(params[:3])
        c0 = params[3]
        if name == "affine":
            return ScalarField(lambda p: p @ g + c0, label, lambda p: np.broadcast_to(g, p.shape).copy())
        return ScalarField(
            lambda p: np.exp(p @ g + c0), label, lambda p: np.exp(p @ g + c0)[..., None] * g
        )

    if name == "coordinate":
        _need(name, params, 1)
        axis = params[0]
        if axis not in (0.0, 1.0, 2.0):
            raise ValueError(f"coordinate axis must be 0, 1 or 2, got {axis!r}")
        i = int(axis)
        e = np.eye(3)[i]
        return ScalarField(lambda p: p[..., i].copy(), label, lambda p: np.broadcast_to(e, p.shape).copy())

    if name == "quadratic-psd":
        _need(name, params, 9)
        a = np.array(params).reshape(3, 3)
        if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, np.abs(a).max())):
            raise ValueError("quadratic-psd matrix must be symmetric")
        eig = np.linalg.eigvalsh(a)
        if eig.min() < -1e-12 * max(1.0, np.abs(eig).max()):
            raise ValueError(f"quadratic-psd matrix is not positive semidefinite (min eigenvalue {eig.min():.3g})")
        return ScalarField(
            lambda p: np.einsum("...i,ij,...j->...", p, a, p), label, lambda p: 2.0 * p @ a
        )

    if name == "max-affine":
        if len(params) == 0 or len(params) % 4:
            raise ValueError(f"max-affine takes {CATALOG_ARITY[name]} parameters, got {len(params)}")
        rows = np.array(params).reshape(-1, 4)
        g, c = rows[:, :3], rows[:, 3]

        def grad(p):
            return g[np.argmax(p @ g.T + c, axis=-1)]

        return ScalarField(lambda p: np.max(p @ g.T + c, axis=-1), label, grad)

    if name in ("norm-squared", "sharpness-cone"):
        want = 3 if name == "norm-squared" else 4
        if not params:
            if ball is None:
                raise ValueError(f"{name} needs {CATALOG_ARITY[name]} parameters")
            params = list(ball.center) + ([ball.radius] if want == 4 else [])
            label = f"{name}[{','.join(repr(p) for p in params)}]"
        _need(name, params, want)
        q = np.array(params[:3])
        if name == "norm-squared":
            return ScalarField(
                lambda p: np.sum((p - q) ** 2, axis=-1), label, lambda p: 2.0 * (p - q)
            )
        r = params[3]

        def cone_grad(p):
            d = p - q
            n = np.linalg.norm(d, axis=-1, keepdims=True)
            with np.errstate(invalid="ignore", divide="ignore"):
                return -d / n

        return ScalarField(lambda p: r - np.linalg.norm(p - q, axis=-1), label, cone_grad)

    raise ValueError(f"unknown catalog field {name!r}; expected one of {', '.join(CATALOG_ARITY)}")
