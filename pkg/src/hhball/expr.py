"""A small arithmetic language for fields in the variables x, y and z.

Grammar, loosest binding first::

    expr    := expr ('+' | '-') term | term
    term    := term ('*' | '/') unary | unary
    unary   := '-' unary | '+' unary | power
    power   := atom '^' unary            (right associative)
    atom    := number | x | y | z | pi | e | '(' expr ')'
             | abs(expr) | exp(expr) | sqrt(expr) | ln(expr)
             | min(expr, expr, ...) | max(expr, expr, ...)

So ``-x^2`` is ``-(x^2)`` and ``2^-1`` is ``0.5``. Evaluation is vectorized
over numpy arrays; leaving the real domain of ``sqrt``, ``ln``, ``/`` or
``^`` raises :class:`~hhball.fields.EvaluationError`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from hhball.fields import EvaluationError, ScalarField


class ExprError(ValueError):
    """Base class for parse failures; ``position`` is a 0-based character offset."""

    kind = "error"

    def __init__(self, message: str, position: int):
        self.position = position
        super().__init__(f"{self.kind} at position {position}: {message}")


class LexError(ExprError):
    kind = "lexical error"


class ExprSyntaxError(ExprError):
    kind = "syntax error"


class ArityError(ExprError):
    kind = "arity error"


# -- AST ---------------------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # neg, abs, exp, sqrt, ln
    arg: "Node"


@dataclass(frozen=True)
class Binary:
    op: str  # + - * / ^
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Nary:
    op: str  # min, max
    args: tuple


Node = Union[Const, Var, Unary, Binary, Nary]

VARIABLES = {"x": 0, "y": 1, "z": 2}
CONSTANTS = {"pi": math.pi, "e": math.e}
UNARY_FUNCS = ("abs", "exp", "sqrt", "ln")
NARY_FUNCS = ("min", "max")

# -- lexer -------------------------------------------------------------------

_NUMBER = re.compile(r"(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@dataclass(frozen=True)
class Token:
    kind: str  # num, name, op, end
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    i = 0
    while i < len(text):
        c = text[i]
        if c in " \t\r\n":
            i += 1
            continue
        if c.isascii() and (c.isdigit() or c == "."):
            m = _NUMBER.match(text, i)
            if m is None:
                raise LexError(f"malformed number {c!r}", i)
            tokens.append(Token("num", m.group(), i))
            i = m.end()
            continue
        if c.isascii() and (c.isalpha() or c == "_"):
            m = _NAME.match(text, i)
            tokens.append(Token("name", m.group(), i))
            i = m.end()
            continue
        if c in "+-*/^(),":
            tokens.append(Token("op", c, i))
            i += 1
            continue
        raise LexError(f"unexpected character {c!r}", i)
    tokens.append(Token("end", "", len(text)))
    return tokens


# -- parser ------------------------------------------------------------------

_BINARY_POWER = {"+": 10, "-": 10, "*": 20, "/": 20, "^": 40}
_UNARY_POWER = 30


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self) -> Token:
        return self.tokens[self.i]

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text or tok.kind != "op":
            raise ExprSyntaxError(f"expected {text!r}, found {_describe(tok)}", tok.pos)
        return self.advance()

    def expression(self, min_power: int = 0) -> Node:
        left = self.prefix()
        while True:
            tok = self.peek()
            if tok.kind != "op" or tok.text not in _BINARY_POWER:
                return left
            power = _BINARY_POWER[tok.text]
            if power < min_power:
                return left
            self.advance()
            if tok.text == "^":
                # right associative; the exponent may carry its own sign
                right = self.expression(_UNARY_POWER)
            else:
                right = self.expression(power + 1)
            left = Binary(tok.text, left, right)

    def prefix(self) -> Node:
        tok = self.advance()
        if tok.kind == "op" and tok.text in "+-":
            arg = self.expression(_UNARY_POWER)
            return Unary("neg", arg) if tok.text == "-" else arg
        if tok.kind == "num":
            return Const(float(tok.text))
        if tok.kind == "op" and tok.text == "(":
            inner = self.expression()
            self.expect(")")
            return inner
        if tok.kind == "name":
            if tok.text in VARIABLES:
                return Var(tok.text)
            if tok.text in CONSTANTS:
                return Const(CONSTANTS[tok.text])
            if tok.text in UNARY_FUNCS or tok.text in NARY_FUNCS:
                return self.call(tok)
            raise ExprSyntaxError(f"unknown name {tok.text!r}", tok.pos)
        raise ExprSyntaxError(f"unexpected {_describe(tok)}", tok.pos)

    def call(self, name: Token) -> Node:
        self.expect("(")
        args = [self.expression()]
        while self.peek().kind == "op" and self.peek().text == ",":
            self.advance()
            args.append(self.expression())
        self.expect(")")
        if name.text in UNARY_FUNCS:
            if len(args) != 1:
                raise ArityError(f"{name.text} takes 1 argument, got {len(args)}", name.pos)
            return Unary(name.text, args[0])
        if len(args) < 2:
            raise ArityError(f"{name.text} takes at least 2 arguments, got {len(args)}", name.pos)
        return Nary(name.text, tuple(args))


def _describe(tok: Token) -> str:
    return "end of input" if tok.kind == "end" else repr(tok.text)


def parse(text: str) -> Node:
    """Parse ``text`` into an AST, raising an :class:`ExprError` subclass on failure."""
    parser = _Parser(text)
    if parser.peek().kind == "end":
        raise ExprSyntaxError("empty expression", parser.peek().pos)
    try:
        node = parser.expression()
    except RecursionError:
        raise ExprSyntaxError("expression nested too deeply", parser.peek().pos) from None
    tok = parser.peek()
    if tok.kind != "end":
        raise ExprSyntaxError(f"unexpected {_describe(tok)}", tok.pos)
    return node


def serialize(node: Node) -> str:
    """Fully parenthesized text that parses back to an equivalent AST."""
    if isinstance(node, Const):
        v = node.value
        if math.isinf(v):
            return "(1e999)" if v > 0 else "(-1e999)"
        return f"({v!r})" if v < 0 else repr(v)
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Unary):
        if node.op == "neg":
            return f"(-{serialize(node.arg)})"
        return f"{node.op}({serialize(node.arg)})"
    if isinstance(node, Binary):
        return f"({serialize(node.left)} {node.op} {serialize(node.right)})"
    return f"{node.op}({', '.join(serialize(a) for a in node.args)})"


# -- evaluation --------------------------------------------------------------


def evaluate(node: Node, points) -> np.ndarray:
    """Evaluate ``node`` at points of shape ``(..., 3)``."""
    p = np.asarray(points, dtype=float)
    with np.errstate(all="ignore"):
        return np.asarray(_eval(node, p), dtype=float) + np.zeros(p.shape[:-1])


def _fail(message: str, bad, points: np.ndarray):
    bad = np.broadcast_to(bad, points.shape[:-1])
    idx = np.argwhere(bad)[0] if bad.ndim else ()
    raise EvaluationError(message, points[tuple(idx)])


def _eval(node: Node, p: np.ndarray):
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Var):
        return p[..., VARIABLES[node.name]]
    if isinstance(node, Unary):
        a = _eval(node.arg, p)
        if node.op == "neg":
            return -a
        if node.op == "abs":
            return np.abs(a)
        if node.op == "exp":
            return np.exp(a)
        if node.op == "sqrt":
            bad = np.asarray(a) < 0
            if np.any(bad):
                _fail("sqrt of a negative number", bad, p)
            return np.sqrt(a)
        bad = np.asarray(a) <= 0
        if np.any(bad):
            _fail("ln of a non-positive number", bad, p)
        return np.log(a)
    if isinstance(node, Binary):
        a = _eval(node.left, p)
        b = _eval(node.right, p)
        if node.op == "+":
            return np.add(a, b)
        if node.op == "-":
            return np.subtract(a, b)
        if node.op == "*":
            return np.multiply(a, b)
        if node.op == "/":
            bad = np.asarray(b) == 0
            if np.any(bad):
                _fail("division by zero", bad, p)
            return np.divide(a, b)
        a_arr, b_arr = np.asarray(a, float), np.asarray(b, float)
        bad = (a_arr < 0) & (np.floor(b_arr) != b_arr)
        if np.any(bad):
            _fail("non-integer power of a negative number", bad, p)
        bad = (a_arr == 0) & (b_arr < 0)
        if np.any(bad):
            _fail("division by zero in power", bad, p)
        return np.power(a_arr, b_arr)
    args = [_eval(a, p) for a in node.args]
    reduce = np.maximum if node.op == "max" else np.minimum
    out = args[0]
    for a in args[1:]:
        out = reduce(out, a)
    return out


def to_field(node: Node, name: str | None = None) -> ScalarField:
    """Wrap an AST as a field; radial derivatives of it use finite differences."""
    return ScalarField(lambda p: evaluate(node, p), name or serialize(node))
