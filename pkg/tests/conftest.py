import numpy as np
import pytest

from hhball import Ball, catalog


@pytest.fixture
def unit_ball():
    return Ball((0.0, 0.0, 0.0), 1.0)


def catalog_fields(ball):
    """One representative instance of every catalog entry, keyed by name."""
    return {
        "constant": catalog("constant", [3.0]),
        "affine": catalog("affine", [0.5, -1.0, 2.0, 0.25]),
        "coordinate": catalog("coordinate", [2]),
        "quadratic-psd": catalog("quadratic-psd", [2.0, 0.5, 0.0, 0.5, 1.0, 0.2, 0.0, 0.2, 0.5]),
        "max-affine": catalog("max-affine", [1.0, 0.0, 0.0, 0.0, -0.5, 1.0, 0.0, 0.1, 0.0, -1.0, 0.5, -0.2]),
        "exp-affine": catalog("exp-affine", [0.3, -0.4, 0.5, 0.1]),
        "norm-squared": catalog("norm-squared", [], ball),
        "sharpness-cone": catalog("sharpness-cone", [], ball),
    }


SMOOTH = ("constant", "affine", "coordinate", "quadratic-psd", "exp-affine", "norm-squared")


def random_interior(ball, n, seed, margin=0.98):
    rng = np.random.default_rng(seed)
    d = rng.normal(size=(n, 3))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    r = margin * ball.radius * np.cbrt(rng.random(n))
    return np.asarray(ball.center) + r[:, None] * d


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
