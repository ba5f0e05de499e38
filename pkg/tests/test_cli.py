import csv
import io
import json
import subprocess
import sys

import pytest

from hhball import __version__
from hhball.cli import RunConfig, emit_report, main, run
from hhball.geometry import Ball

FAST = ["--n-rho", "16", "--n-phi", "16", "--n-theta", "32"]


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sharpness_trapezoid(capsys):
    code, out, _ = run_cli(capsys, "--ball", "0,0,0,1", "--catalog", "sharpness-cone", "--check", "trapezoid")
    assert code == 0
    doc = json.loads(out)
    assert len(doc["checks"]) == 1
    c = doc["checks"][0]
    assert c["name"] == "trapezoid" and c["holds"] is True
    assert c["lhs"] == pytest.approx(0.25, abs=1e-10) and c["rhs"] == pytest.approx(0.25, abs=1e-10)
    assert abs(c["margin"]) <= c["tolerance"]


def test_schema_keys(capsys):
    code, out, _ = run_cli(capsys, "--ball", "0,0,0,1", "--expr", "x*x+y*y+z*z", "--check", "all")
    assert code == 0
    doc = json.loads(out)
    assert list(doc) == ["ball", "function", "spec", "means", "checks", "certificates", "version"]
    assert doc["ball"] == {"center": [0.0, 0.0, 0.0], "radius": 1.0}
    assert doc["function"] == {"kind": "expr", "source": "x*x+y*y+z*z"}
    assert doc["spec"] == {"n_rho": 32, "n_phi": 32, "n_theta": 64, "mc_samples": 1000000, "seed": 0}
    assert set(doc["means"]) == {
        "volume_mean", "surface_mean", "center_value", "radial_abs_surface_integral", "error_estimates"
    }
    for c in doc["checks"]:
        assert list(c) == ["name", "lhs", "rhs", "margin", "holds", "tolerance"]
        assert c["holds"]
    assert {c["name"] for c in doc["checks"]} >= {"hh_lower", "hh_upper", "trapezoid", "midpoint", "surface_center"}
    for cert in doc["certificates"]:
        assert list(cert) == ["target", "passed", "max_violation"]
    assert doc["version"] == __version__


def test_negative_radius(capsys):
    code, _, err = run_cli(capsys, "--ball", "0,0,0,-1", "--catalog", "constant:1")
    assert code == 2 and "radius must be positive" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["--ball", "0,0,1", "--catalog", "constant:1"],
        ["--ball", "0,0,0,abc", "--catalog", "constant:1"],
        ["--ball", "0,0,0,1", "--catalog", "nonsense"],
        ["--ball", "0,0,0,1", "--catalog", "constant:1,2"],
        ["--ball", "0,0,0,1", "--expr", "x +"],
        ["--ball", "0,0,0,1", "--catalog", "constant:1", "--check", "bogus"],
        ["--ball", "0,0,0,1", "--catalog", "constant:1", "--n-rho", "0"],
        ["--ball", "0,0,0,1", "--catalog", "constant:1", "--tol", "-1"],
    ],
)
def test_config_errors_exit_2(capsys, argv):
    code, out, err = run_cli(capsys, *argv)
    assert code == 2 and out == "" and err


def test_parse_error_shows_position(capsys):
    code, _, err = run_cli(capsys, "--ball", "0,0,0,1", "--expr", "x +")
    assert code == 2 and "position 3" in err


@pytest.mark.parametrize("argv", [[], ["--ball", "0,0,0,1"], ["--ball", "0,0,0,1", "--catalog", "constant:1", "--expr", "1"]])
def test_argparse_errors_exit_2(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


def test_evaluation_error_exit_3(capsys):
    code, out, err = run_cli(capsys, "--ball", "0,0,0,1", "--expr", "1/x", *FAST)
    assert code == 3 and "evaluation error" in err and "point" in err


def test_failing_check_exit_1(capsys):
    code, out, _ = run_cli(capsys, "--ball", "0,0,0,1", "--catalog", "sharpness-cone", "--check", "hh", *FAST)
    assert code == 1
    doc = json.loads(out)
    lower = doc["checks"][0]
    assert lower["name"] == "hh_lower" and lower["holds"] is False
    assert doc["certificates"][0] == {"target": "f", "passed": False, "max_violation": pytest.approx(doc["certificates"][0]["max_violation"])}
    assert doc["certificates"][0]["max_violation"] > 0


def test_csv(capsys):
    code, out, _ = run_cli(
        capsys, "--ball", "1,2,3,0.5", "--catalog", "norm-squared", "--check", "trapezoid,midpoint", "--format", "csv", *FAST
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "name,lhs,rhs,margin,holds,tolerance"
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [r["name"] for r in rows] == ["trapezoid", "midpoint"]
    assert float(rows[0]["lhs"]) == pytest.approx(0.1) and rows[0]["holds"] == "True"


def test_out_file_and_tol(tmp_path, capsys):
    path = tmp_path / "report.json"
    code, out, _ = run_cli(
        capsys, "--ball", "0,0,0,1", "--catalog", "constant:2", "--check", "midpoint", "--tol", "0.5", "--out", str(path), *FAST
    )
    assert code == 0 and out == ""
    doc = json.loads(path.read_text())
    assert doc["checks"][0]["tolerance"] == 0.5
    assert doc["function"] == {"kind": "catalog", "source": "constant:2.0"}


def test_unwritable_out_exit_3(tmp_path, capsys):
    code, _, err = run_cli(
        capsys, "--ball", "0,0,0,1", "--catalog", "constant:2", "--check", "midpoint",
        "--out", str(tmp_path / "missing" / "r.json"), *FAST,
    )
    assert code == 3 and "cannot write" in err


def test_negative_center_needs_equals_form(capsys):
    code, out, _ = run_cli(capsys, "--ball=-1,0,0,2", "--catalog", "norm-squared", "--check", "hh", *FAST)
    assert code == 0 and json.loads(out)["ball"]["center"] == [-1.0, 0.0, 0.0]


def test_byte_identical(capsys):
    argv = ["--ball", "0.5,-0.5,1,1.5", "--catalog", "exp-affine:0.3,0.2,-0.1,0", "--check", "all", "--seed", "42"]
    _, first, _ = run_cli(capsys, *argv)
    _, second, _ = run_cli(capsys, *argv, "--workers", "4")
    assert first == second


def test_verbose_details(capsys):
    code, out, _ = run_cli(capsys, "--ball", "0,0,0,1", "--catalog", "sharpness-cone", "-v", *FAST)
    doc = json.loads(out)
    assert "details" in doc
    assert doc["details"]["surface_integral_f"] == pytest.approx(0.0, abs=1e-12)
    f_cert = next(c for c in doc["details"]["certificates"] if c["target"] == "f")
    assert f_cert["counterexample"] is not None


def test_emit_report_requires_checks():
    with pytest.raises(ValueError):
        emit_report({"checks": []})


def test_run_with_config(capsys):
    cfg = RunConfig(ball=Ball((0, 0, 0), 1), catalog="constant", catalog_params=(1.0,), checks=("hh",))
    buf = io.StringIO()
    assert run(cfg, stdout=buf) == 0
    assert json.loads(buf.getvalue())["checks"][0]["name"] == "hh_lower"


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hhball", "--ball", "0,0,0,1", "--catalog", "sharpness-cone", "--check", "trapezoid"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout)["checks"][0]["holds"] is True


def test_help_documents_grammar(capsys):
    with pytest.raises(SystemExit):
        main(["--help"])
    out = capsys.readouterr().out
    assert "right associative" in out and "sharpness-cone" in out
