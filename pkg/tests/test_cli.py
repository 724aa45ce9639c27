import json
import subprocess
import sys

import numpy as np
import pytest

from sasaki3.cli import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, run
from sasaki3.elliptic import read_grid_csv
from sasaki3.plotting import read_ppm

KEYS = {"command", "inputs", "residuals", "verdict", "runtime_ms"}


def check_schema(report):
    assert set(report) == KEYS
    assert all(isinstance(v, float) for v in report["residuals"].values())
    json.dumps(report)


def test_verify_nil():
    code, rep = run(["verify", "--p0", "1/sqrt(2)", "--samples", "10"])
    check_schema(rep)
    assert code == EXIT_PASS
    assert rep["verdict"]["status"] == "pass"
    assert rep["verdict"]["R_mean"] == pytest.approx(-2, abs=1e-8)


def test_family_round():
    code, rep = run(["family", "--W", "2", "--samples", "6", "--euler-samples", "5"])
    check_schema(rep)
    assert code == EXIT_PASS
    v = rep["verdict"]
    assert (v["R"], v["a"], v["b"]) == pytest.approx((6, 2, 0), abs=1e-6)
    assert v["sasakian"] == "pass" and v["einstein"]


def test_family_negative_W_flag_value():
    code, rep = run(["family", "--W", "-2", "--samples", "4", "--euler-samples", "5"])
    assert code == EXIT_PASS and rep["verdict"]["sign_class"] == "negative"


def test_conformal_reports_verdict():
    code, rep = run(["conformal", "--W", "0", "--samples", "2"])
    assert code == EXIT_PASS
    assert rep["verdict"]["flat"] is False
    assert rep["verdict"]["C00"] == pytest.approx(2.5)
    code, rep = run(["conformal", "--p0", "0.5*sqrt(2)*(1+u^2+v^2)", "--samples", "2"])
    assert rep["verdict"]["flat"] is True


def test_isometry_exit_codes():
    code, rep = run(["isometry", "--p0", "1/sqrt(2)", "--map-u", "u*cos(1)-v*sin(1)", "--map-v", "u*sin(1)+v*cos(1)"])
    assert code == EXIT_PASS
    code, rep = run(["isometry", "--p0", "1/sqrt(2)", "--map-u", "2*u", "--map-v", "2*v"])
    assert code == EXIT_FAIL
    assert rep["residuals"]["isometry"] == pytest.approx(1.5, abs=1e-10)


def test_usage_errors_still_report():
    code, rep = run(["verify", "--p0", "1+*u"])
    check_schema(rep)
    assert code == EXIT_USAGE
    assert "offset 2" in rep["verdict"]["message"]
    assert run(["frobnicate"])[0] == EXIT_USAGE
    assert run(["family"])[0] == EXIT_USAGE
    assert run(["verify", "--p0", "u"])[0] == EXIT_USAGE  # P0 vanishes


def test_solve_writes_grid(tmp_path):
    out = tmp_path / "p0.csv"
    code, rep = run(["solve", "--R", "sin(u)*cos(v)", "--grid", "33", "--domain", "-1,1,-1,1",
                     "--boundary", "0", "--out", str(out), "--e2e-tol", "0.1"])
    check_schema(rep)
    assert code == EXIT_PASS
    g = read_grid_csv(out)
    assert g.values.shape == (33, 33) and np.all(g.values > 0)


def test_solve_convergence_failure_exits_one():
    code, rep = run(["solve", "--R", "sin(u)", "--grid", "17", "--max-iter", "1"])
    assert code == EXIT_FAIL
    assert rep["verdict"]["error"] == "ConvergenceError"


def test_build_exports_components(tmp_path):
    code, rep = run(["build", "--p0", "1/sqrt(2)", "--grid", "5", "--out", str(tmp_path / "nil")])
    assert code == EXIT_PASS
    assert len(rep["verdict"]["files"]) == 6
    g_ru = read_grid_csv(tmp_path / "nil_g_ru.csv")
    assert np.allclose(g_ru.values, 2 * g_ru.mesh()[1])  # A = 2 v for Nil


def test_plot_outputs(tmp_path):
    ppm = tmp_path / "f.ppm"
    assert run(["plot", "--field", "u*v", "--grid", "9", "--format", "ppm", "--out", str(ppm)])[0] == EXIT_PASS
    img = read_ppm(ppm)
    assert img.shape == (9, 9, 3)
    table = tmp_path / "f.dat"
    assert run(["plot", "--field", "0.5*sqrt(2)*(1+u^2+v^2)", "--quantity", "curvature", "--grid", "5",
                "--out", str(table)])[0] == EXIT_PASS
    rows = [line.split() for line in table.read_text().splitlines() if line and not line.startswith("#")]
    assert len(rows) == 25
    assert all(float(r[2]) == pytest.approx(6.0) for r in rows)


def test_job_file_and_flag_precedence(tmp_path):
    job = tmp_path / "job.json"
    job.write_text(json.dumps({"command": "family", "W": 1.0, "samples": 3, "euler_samples": 3}))
    code, rep = run(["--job", str(job)])
    assert code == EXIT_PASS and rep["inputs"]["W"] == 1.0
    code, rep = run(["--job", str(job), "family", "--W", "2"])
    assert rep["inputs"]["W"] == 2.0 and rep["inputs"]["samples"] == 3


def test_reports_are_deterministic():
    args = ["verify", "--p0", "0.8+0.1*sin(u)", "--samples", "3", "--seed", "5"]
    a, b = run(args)[1], run(args)[1]
    a.pop("runtime_ms"), b.pop("runtime_ms")
    assert a == b


def test_console_entry_point(tmp_path):
    report = tmp_path / "r.json"
    proc = subprocess.run([sys.executable, "-m", "sasaki3.cli", "--report", str(report),
                           "verify", "--p0", "1/sqrt(2)", "--samples", "3"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout) == json.loads(report.read_text())
