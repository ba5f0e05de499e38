# %% [markdown]
# # Fields from text
#
# Any expression in x, y and z can be checked. Parsed fields have no analytic
# gradient, so radial derivatives come from finite differences.

# %%
from hhball import Ball, parse, to_field, verify
from hhball.expr import ExprError, serialize
from hhball.fields import EvaluationError

ball = Ball((0, 0, 0), 1.0)
for text in ["x^2 + y^2 + z^2", "sqrt(1 + x^2 + y^2 + z^2)", "max(x, y, 0) + 0.5*z", "exp(-(x^2 + y^2 + z^2))"]:
    v = verify(to_field(parse(text)), ball, checks=["hh", "trapezoid", "midpoint"])
    cells = "  ".join(f"{r.name}={'ok' if r.holds else 'FAIL'}" for r in v.reports)
    certs = ", ".join(f"{c.target}:{'convex' if c.passed else 'not convex'}" for c in v.certificates)
    print(f"{text:28s} {cells}   [{certs}]")

# %% [markdown]
# Serialization is fully parenthesized and parses back to the same tree:

# %%
node = parse("-x^2^0.5 + 2*-y")
print(serialize(node), parse(serialize(node)) == node)

# %% [markdown]
# Errors carry positions (parse) or points (evaluation):

# %%
for text in ["x * (y + ", "x $ 2", "max(x)"]:
    try:
        parse(text)
    except ExprError as e:
        print(f"{text!r:14} -> {e}")

try:
    verify(to_field(parse("ln(x)")), ball, checks=["hh"])
except EvaluationError as e:
    print("ln(x) ->", e)
