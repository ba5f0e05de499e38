import math

import numpy as np
import pytest

from hhball import Ball, catalog, parse, to_field
from hhball.expr import (
    ArityError,
    Binary,
    Const,
    ExprError,
    ExprSyntaxError,
    LexError,
    Nary,
    Unary,
    Var,
    evaluate,
    serialize,
)
from hhball.fields import EvaluationError
from hhball.quadrature import sphere_integral

from conftest import random_interior

P123 = np.array([1.0, 2.0, 3.0])


@pytest.mark.parametrize(
    "text, point, want",
    [
        ("x^2 + y^2 + z^2", (1, 2, 3), 14.0),
        ("max(x, y, 0)", (-1, -2, 0), 0.0),
        ("1", (5, 6, 7), 1.0),
        ("-x^2", (3, 0, 0), -9.0),
        ("2^3^2", (0, 0, 0), 512.0),
        ("2^-1", (0, 0, 0), 0.5),
        ("(-2)^3", (0, 0, 0), -8.0),
        ("1 - 2 - 3", (0, 0, 0), -4.0),
        ("8 / 4 / 2", (0, 0, 0), 1.0),
        ("1 + 2 * 3", (0, 0, 0), 7.0),
        ("-(1 + 2) * 3", (0, 0, 0), -9.0),
        ("abs(x) + sqrt(y) + ln(e) + exp(0)", (-2, 4, 0), 6.0),
        ("min(x, y, z, -1.5e0)", (1, 2, 3), -1.5),
        ("pi", (0, 0, 0), math.pi),
        ("  x\t*\ny ", (2, 3, 0), 6.0),
        (".5 + 1.", (0, 0, 0), 1.5),
    ],
)
def test_evaluates(text, point, want):
    assert float(evaluate(parse(text), np.array(point, dtype=float))) == pytest.approx(want, rel=1e-15)


def test_ast_shape():
    assert parse("max(x, y, 0)") == Nary("max", (Var("x"), Var("y"), Const(0.0)))
    assert parse("-x^2") == Unary("neg", Binary("^", Var("x"), Const(2.0)))


@pytest.mark.parametrize(
    "text, error, position",
    [
        ("x +", ExprSyntaxError, 3),
        ("", ExprSyntaxError, 0),
        ("   ", ExprSyntaxError, 3),
        ("x $ y", LexError, 2),
        ("(x + y", ExprSyntaxError, 6),
        ("x y", ExprSyntaxError, 2),
        ("w + 1", ExprSyntaxError, 0),
        ("sqrt(x, y)", ArityError, 0),
        ("1 + max(x)", ArityError, 4),
        ("abs x", ExprSyntaxError, 4),
        ("x * * y", ExprSyntaxError, 4),
        ("max(x,)", ExprSyntaxError, 6),
        ("1.2.3", ExprSyntaxError, 3),
        ("x é", LexError, 2),
    ],
)
def test_rejects_with_position(text, error, position):
    with pytest.raises(error) as info:
        parse(text)
    assert info.value.position == position
    assert f"position {position}" in str(info.value)


@pytest.mark.parametrize(
    "text, point",
    [
        ("1/x", (0, 0, 0)),
        ("sqrt(x)", (-1, 0, 0)),
        ("ln(y)", (0, 0, 0)),
        ("x^0.5", (-1, 0, 0)),
        ("x^-1", (0, 2, 0)),
    ],
)
def test_evaluation_errors(text, point):
    f = to_field(parse(text))
    with pytest.raises(EvaluationError) as info:
        f(np.array(point, dtype=float))
    assert info.value.point == tuple(float(c) for c in point)


def test_evaluation_error_names_first_offending_point():
    pts = np.array([[1.0, 0, 0], [-2.0, 0, 0], [-3.0, 0, 0]])
    with pytest.raises(EvaluationError) as info:
        to_field(parse("sqrt(x)"))(pts)
    assert info.value.point == (-2.0, 0.0, 0.0)


def test_negative_base_integer_power_is_fine():
    assert float(evaluate(parse("x^3"), np.array([-2.0, 0, 0]))) == -8.0


def test_constant_field_shape():
    f = to_field(parse("1"))
    assert f(np.zeros((4, 5, 3))).shape == (4, 5)
    assert np.all(f(np.zeros((4, 5, 3))) == 1.0)


def random_expression(rng, depth=0):
    r = rng.random()
    if depth > 4 or r < 0.3:
        leaf = rng.integers(5)
        if leaf < 3:
            return "xyz"[leaf]
        return repr(float(np.round(rng.normal() * 3, rng.integers(0, 6))))
    kind = rng.integers(6)
    if kind == 0:
        return f"-{random_expression(rng, depth + 1)}"
    if kind == 1:
        fn = ["abs", "exp", "sqrt", "ln"][rng.integers(4)]
        return f"{fn}({random_expression(rng, depth + 1)})"
    if kind == 2:
        fn = ["min", "max"][rng.integers(2)]
        args = ", ".join(random_expression(rng, depth + 1) for _ in range(rng.integers(2, 4)))
        return f"{fn}({args})"
    op = "+-*/^"[rng.integers(5)]
    a, b = random_expression(rng, depth + 1), random_expression(rng, depth + 1)
    return f"({a}) {op} {b}" if rng.random() < 0.5 else f"{a} {op} {b}"


def _outcome(node, pts):
    try:
        return evaluate(node, pts)
    except EvaluationError as e:
        return e.point


def test_round_trip_evaluates_identically():
    rng = np.random.default_rng(8)
    pts = random_interior(Ball((0, 0, 0), 2.0), 1000, seed=9)
    for _ in range(300):
        text = random_expression(rng)
        a = parse(text)
        b = parse(serialize(a))
        assert b == a, text
        ra, rb = _outcome(a, pts), _outcome(b, pts)
        if isinstance(ra, tuple):
            assert ra == rb, text
        else:
            assert np.array_equal(ra, rb, equal_nan=True), text


def test_round_trip_is_structural_for_plain_input():
    for text in ["x^2 + y^2 + z^2", "max(x, -y, 0.25) / (1 + exp(-z))", "-(-x)", "2^-x^2"]:
        a = parse(text)
        assert parse(serialize(parse(serialize(a)))) == parse(serialize(a))


def test_matches_catalog_norm_squared(unit_ball):
    parsed = to_field(parse("x*x + y*y + z*z"))
    cat = catalog("norm-squared", [0, 0, 0])
    pts = random_interior(unit_ball, 1000, seed=10, margin=1.0)
    assert np.max(np.abs(parsed(pts) - cat(pts))) <= 1e-12
    assert sphere_integral(parsed, unit_ball).value / unit_ball.area == pytest.approx(1.0, abs=1e-12)


def _check_no_crash(text):
    try:
        parse(text)
    except ExprError as e:
        assert isinstance(e.position, int) and 0 <= e.position <= len(text)


def test_fuzz_random_bytes():
    rng = np.random.default_rng(11)
    for _ in range(10_000):
        n = int(rng.integers(0, 65))
        _check_no_crash(bytes(rng.integers(0, 256, n, dtype=np.uint8)).decode("latin-1"))


def test_fuzz_grammar_alphabet():
    alphabet = list("xyz0123456789.eE+-*/^(), ") + ["max", "min", "sqrt", "ln", "abs", "exp", "pi"]
    rng = np.random.default_rng(12)
    pts = random_interior(Ball((0, 0, 0), 1.0), 16, seed=1)
    for _ in range(10_000):
        text = "".join(alphabet[i] for i in rng.integers(0, len(alphabet), rng.integers(1, 24)))[:64]
        try:
            node = parse(text)
        except ExprError as e:
            assert 0 <= e.position <= len(text)
            continue
        try:
            evaluate(node, pts)
        except EvaluationError:
            pass


def test_deep_nesting_is_rejected_cleanly():
    with pytest.raises(ExprSyntaxError):
        parse("(" * 5000 + "x" + ")" * 4999)
