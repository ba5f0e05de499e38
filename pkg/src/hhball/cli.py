"""Command-line verification runs.

Exit status: 0 when every executed check holds, 1 when any fails, 2 on a
configuration or parse error, 3 on a numerical, evaluation or I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

from hhball import __version__
from hhball.expr import ExprError, parse, to_field
from hhball.fields import CATALOG_ARITY, EvaluationError, ScalarField, catalog
from hhball.geometry import Ball
from hhball.inequalities import ALL_CHECKS, Verification, normalize_checks, verify
from hhball.quadrature import QuadratureSpec

EXIT_OK, EXIT_FAIL, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3

GRAMMAR_HELP = """\
expression grammar (--expr):
  numbers, variables x y z, constants pi e
  binary + - * / and ^ (right associative, binds tighter than unary minus)
  functions abs exp sqrt ln (one argument), min max (two or more)
  example: "max(x, y, 0) + exp(-(x^2 + y^2 + z^2))"

catalog fields (--catalog NAME[:p1,p2,...]):
""" + "\n".join(f"  {k:15s}{v}" for k, v in CATALOG_ARITY.items()) + """

a ball center with a negative first coordinate needs the = form: --ball=-1,0,0,2
"""


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    ball: Ball
    catalog: Optional[str] = None
    catalog_params: tuple = ()
    expr: Optional[str] = None
    checks: tuple = ("all",)
    spec: QuadratureSpec = field(default_factory=QuadratureSpec)
    tol: Optional[float] = None
    out: Optional[str] = None
    format: str = "json"
    verbose: bool = False

    def __post_init__(self):
        if (self.catalog is None) == (self.expr is None):
            raise ConfigError("exactly one of --catalog or --expr is required")
        if self.format not in ("json", "csv"):
            raise ConfigError(f"unknown format {self.format!r}")
        try:
            self.checks = tuple(normalize_checks(self.checks))
        except ValueError as e:
            raise ConfigError(str(e)) from None

    @property
    def function(self) -> dict:
        if self.expr is not None:
            return {"kind": "expr", "source": self.expr}
        params = ",".join(repr(float(p)) for p in self.catalog_params)
        return {"kind": "catalog", "source": f"{self.catalog}:{params}" if params else self.catalog}

    def build_field(self) -> ScalarField:
        try:
            if self.expr is not None:
                return to_field(parse(self.expr))
            return catalog(self.catalog, self.catalog_params, ball=self.ball)
        except ExprError as e:
            raise ConfigError(f"{e}\n  {self.expr}\n  {' ' * e.position}^") from None
        except ValueError as e:
            raise ConfigError(str(e)) from None


def _floats(text: str, what: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"{what}: expected comma-separated numbers, got {text!r}") from None
    if not all(math.isfinite(v) for v in vals):
        raise ConfigError(f"{what}: values must be finite")
    return vals


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hhball",
        description="Check Hermite-Hadamard type inequalities for a field on a ball in R^3.",
        epilog=GRAMMAR_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--ball", required=True, metavar="a,b,c,R", help="ball center and radius")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--catalog", metavar="NAME[:p1,p2,...]", help="built-in field")
    src.add_argument("--expr", metavar="TEXT", help="field expression in x, y, z")
    p.add_argument(
        "--check", default="all", metavar="LIST",
        help=f"comma-separated subset of {', '.join(ALL_CHECKS)}, all (default: all)",
    )
    p.add_argument("--n-rho", type=int, default=32)
    p.add_argument("--n-phi", type=int, default=32)
    p.add_argument("--n-theta", type=int, default=64)
    p.add_argument("--mc-samples", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1, help="threads for node evaluation")
    p.add_argument("--tol", type=float, default=None, help="override every check's tolerance")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    p.add_argument("-v", "--verbose", action="store_true", help="add diagnostic details to JSON reports")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    vals = _floats(args.ball, "--ball")
    if len(vals) != 4:
        raise ConfigError(f"--ball needs 4 numbers a,b,c,R, got {len(vals)}")
    try:
        ball = Ball(tuple(vals[:3]), vals[3])
    except ValueError as e:
        raise ConfigError(str(e)) from None
    name, params = None, ()
    if args.catalog is not None:
        name, _, rest = args.catalog.partition(":")
        params = tuple(_floats(rest, "--catalog")) if rest else ()
    if args.tol is not None and not (math.isfinite(args.tol) and args.tol >= 0):
        raise ConfigError("--tol must be a finite nonnegative number")
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            spec = QuadratureSpec(args.n_rho, args.n_phi, args.n_theta, args.mc_samples, args.seed, args.workers)
    except ValueError as e:
        raise ConfigError(str(e)) from None
    return RunConfig(
        ball=ball,
        catalog=name,
        catalog_params=params,
        expr=args.expr,
        checks=tuple(args.check.split(",")),
        spec=spec,
        tol=args.tol,
        out=args.out,
        format=args.format,
        verbose=args.verbose,
    )


def report_document(config: RunConfig, result: Verification) -> dict:
    doc = {
        "ball": {"center": list(config.ball.center), "radius": config.ball.radius},
        "function": config.function,
        "spec": config.spec.to_dict(),
        "means": result.summary.to_dict(),
        "checks": [r.to_dict() for r in result.reports],
        "certificates": [c.to_dict() for c in result.certificates],
        "version": __version__,
    }
    if config.verbose:
        s = result.summary
        doc["details"] = {
            # alternative reading of the surface-center bound's last term, integral of f itself
            "surface_integral_f": s.surface_integral,
            "surface_center_rhs_with_f": (
                None if "surface_center" not in config.checks else
                next(r.rhs for r in result.reports if r.name == "surface_center")
                - s.radial_abs_surface_integral / (8 * math.pi * config.ball.radius)
                + s.surface_integral / (8 * math.pi * config.ball.radius)
            ),
            "certificates": [
                {
                    "target": c.target,
                    "samples_tested": c.samples_tested,
                    "excluded": c.excluded,
                    "tolerance": c.tolerance,
                    "counterexample": None if c.counterexample is None else {
                        "x": list(c.counterexample[0]),
                        "y": list(c.counterexample[1]),
                        "lambda": c.counterexample[2],
                    },
                }
                for c in result.certificates
            ],
        }
    return doc


def emit_report(doc: dict, format: str = "json") -> str:
    """Serialize a report document as JSON, or as CSV with one row per check."""
    if not doc.get("checks"):
        raise ValueError("a report needs at least one check")
    if format == "json":
        return json.dumps(doc, indent=2, allow_nan=True) + "\n"
    if format != "csv":
        raise ValueError(f"unknown format {format!r}")
    buf = io.StringIO()
    cols = ["name", "lhs", "rhs", "margin", "holds", "tolerance"]
    w = csv.DictWriter(buf, cols, lineterminator="\n")
    w.writeheader()
    for row in doc["checks"]:
        w.writerow({k: (repr(row[k]) if isinstance(row[k], float) else row[k]) for k in cols})
    return buf.getvalue()


def run(config: RunConfig, stdout=None, stderr=None) -> int:
    """Execute ``config`` and write its report; returns the exit status."""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        f = config.build_field()
    except ConfigError as e:
        print(f"hhball: {e}", file=stderr)
        return EXIT_CONFIG
    try:
        result = verify(f, config.ball, config.spec, config.checks, config.tol)
    except (EvaluationError, FloatingPointError) as e:
        print(f"hhball: evaluation error: {e}", file=stderr)
        return EXIT_NUMERIC
    text = emit_report(report_document(config, result), config.format)
    try:
        if config.out:
            with open(config.out, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        else:
            stdout.write(text)
    except OSError as e:
        print(f"hhball: cannot write report: {e}", file=stderr)
        return EXIT_NUMERIC
    for r in result.reports:
        if not all(map(math.isfinite, (r.lhs, r.rhs))):
            print(f"hhball: check {r.name} produced a non-finite value", file=stderr)
            return EXIT_NUMERIC
    return EXIT_OK if result.all_hold else EXIT_FAIL


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
    except ConfigError as e:
        print(f"hhball: {e}", file=sys.stderr)
        return EXIT_CONFIG
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
