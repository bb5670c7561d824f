import json
import os
import subprocess

import pytest

CLI = os.environ.get("IETSURF_CLI")

pytestmark = pytest.mark.skipif(CLI is None, reason="IETSURF_CLI not set")


def run_cli(*args):
    return subprocess.run([CLI, *args], capture_output=True, text=True)


def test_version():
    r = run_cli("--version")
    assert r.returncode == 0
    assert r.stdout.strip() == "ietsurf 0.3.0"


def test_perm_info():
    r = run_cli("perm", "info", "--sigma", "4,3,2,1")
    assert r.returncode == 0
    info = json.loads(r.stdout)
    assert info["k"] == 1
    assert info["orders"] == [2]
    assert info["genus"] == 2


def test_pair_cone_b0():
    r = run_cli("pair", "cone", "--sigma", "4,3,2,1", "--b", "b0")
    assert r.returncode == 0
    assert json.loads(r.stdout)["in_cone"] is True


def test_require_positive_exit_code():
    r = run_cli(
        "pair", "positive", "--sigma", "2,1", "--a", "1,1", "--b=-1,1",
        "--require-positive",
    )
    assert r.returncode == 2
    assert json.loads(r.stdout)["verdict"] == "NotPositive"


def test_error_goes_to_stderr_as_json():
    r = run_cli("iet", "eval", "--sigma", "2,1", "--lengths", "1,1", "--x", "5")
    assert r.returncode == 1
    assert r.stdout == ""
    err = json.loads(r.stderr)
    assert err["error"] == "OutOfDomain"
    assert "message" in err


def test_float_literal_warns_but_runs():
    r = run_cli("iet", "eval", "--sigma", "2,1", "--lengths", "1,1.5", "--x", "0.25")
    assert r.returncode == 0
    assert "float" in r.stderr
    assert json.loads(r.stdout)["value"] == pytest.approx(1.75)


def test_exact_rejects_float_literals():
    r = run_cli(
        "iet", "eval", "--sigma", "2,1", "--lengths", "1,1.5", "--x", "0.25", "--exact"
    )
    assert r.returncode == 1
    assert json.loads(r.stderr)["error"] == "ParseError"


def test_scan_csv_is_deterministic(tmp_path):
    out1 = tmp_path / "m1.csv"
    out2 = tmp_path / "m2.csv"
    for out in (out1, out2):
        r = run_cli(
            "exp", "mahler", "--d", "3", "--window", "0.2,2", "--samples", "8",
            "--cap", "4096", "--threads", "2" if out is out1 else "1",
            "--out", str(out),
        )
        assert r.returncode == 0
    assert out1.read_bytes() == out2.read_bytes()
    summary = json.loads((tmp_path / "m1.summary.json").read_text())
    assert summary["cone_failures"] == 0
    assert summary["samples"] == 8
