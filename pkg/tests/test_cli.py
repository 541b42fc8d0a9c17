import csv
import json
import os
import subprocess
import sys

import pytest

from csgs.cli import SCHEMA_VERSION, build_id, run


@pytest.fixture(autouse=True)
def fixed_build(monkeypatch):
    monkeypatch.setenv("CSGS_BUILD_ID", "test-build")
    monkeypatch.delenv("CSGS_JOBS", raising=False)


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def envelope_ok(doc, command):
    assert {"schema_version", "command", "params", "build_id", "result"} <= set(doc)
    assert doc["schema_version"] == SCHEMA_VERSION and doc["command"] == command
    assert doc["build_id"] == "test-build"


def test_threshold(capsys):
    code, out, err = call(capsys, "threshold", "--p", "3", "--q", "0.1", "--mu", "1", "--lambda", "1")
    assert code == 0
    doc = json.loads(out)
    envelope_ok(doc, "threshold")
    assert doc["result"]["omega_sharp"] == pytest.approx(1.225, abs=1e-9)
    assert doc["params"]["lambda"] == 1.0
    assert "omega*" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["threshold", "--p", "6"],
        ["threshold", "--p", "3", "--q", "-1"],
        ["solve", "--p", "4"],
        ["solve", "--bogus", "1"],
        ["oracle", "--p", "3"],
        ["sweep", "--axis", "p", "--from", "3", "--to", "6", "--steps", "3"],
        ["sweep", "--axis", "q", "--from", "0.1", "--to", "1", "--steps", "0"],
        ["sweep", "--axis", "q", "--from", "-1", "--to", "1", "--steps", "3"],
        ["verify", "--count", "-1"],
        [],
    ],
)
def test_invalid_input_exits_2(capsys, argv):
    code, out, err = call(capsys, *argv)
    assert code == 2 and out == "" and "error" in err


def test_unwritable_path(capsys, tmp_path):
    code, _, err = call(capsys, "threshold", "--out", str(tmp_path / "missing" / "x.json"))
    assert code == 2 and "cannot write" in err


def test_solve_with_artifacts(capsys, tmp_path):
    out = tmp_path / "gs.json"
    code, stdout, _ = call(capsys, "solve", "--p", "6", "--omega", "1", "--mu", "1", "--q", "1",
                           "--lambda", "1", "--out", str(out))
    assert code == 0 and stdout == ""
    doc = json.loads(out.read_text())
    envelope_ok(doc, "solve")
    res = doc["result"]
    assert res["sigma"] > 0 and res["converged"] and res["within_tolerance"]
    assert res["residuals"]["nehari"] <= 1e-4 and res["residuals"]["pde_l2"] <= 1e-3
    prof = tmp_path / "gs.profile.csv"
    assert res["profile_csv"] == prof.name
    with open(prof) as fh:
        assert next(csv.reader(fh)) == ["r", "u", "h", "V1", "V2"]


def test_solve_nonconvergence_exits_3(capsys, tmp_path):
    out = tmp_path / "gs.json"
    code, _, _ = call(capsys, "solve", "--max-iters", "1", "--out", str(out))
    assert code == 3
    assert json.loads(out.read_text())["result"]["converged"] is False
    assert (tmp_path / "gs.profile.csv").exists()


def test_threshold_sweep_csv(capsys, tmp_path):
    out = tmp_path / "sw.json"
    code, _, _ = call(capsys, "sweep", "--axis", "q", "--from", "0.05", "--to", "0.2", "--steps", "4",
                      "--p", "3", "--out", str(out))
    assert code == 0
    doc = json.loads(out.read_text())
    envelope_ok(doc, "sweep")
    assert "q" not in doc["params"] and doc["result"]["checks"]["nonincreasing"]["passed"]
    rows = list(csv.reader(open(tmp_path / "sw.csv")))
    assert rows[0] == ["axis", "value", "omega_sharp", "omega_sufficient", "t_star"]
    assert len(rows) == 5 and rows[1][0] == "q"
    assert float(rows[1][1]) == 0.05


def test_sweep_jobs_from_environment(capsys, tmp_path, monkeypatch):
    args = ["sweep", "--axis", "mu", "--from", "0.5", "--to", "2", "--steps", "3", "--p", "4", "--log"]
    _, serial, _ = call(capsys, *args)
    monkeypatch.setenv("CSGS_JOBS", "2")
    code, para, err = call(capsys, *args)
    assert code == 0 and "2 jobs" in err
    assert serial == para


def test_omega_sweep_solves(capsys):
    code, out, _ = call(capsys, "sweep", "--axis", "omega", "--from", "1", "--to", "2", "--steps", "2",
                        "--p", "6")
    doc = json.loads(out)
    assert code == 0 and doc["result"]["mode"] == "solve"
    assert all(r["converged"] for r in doc["result"]["rows"])


def test_verify_small_and_deterministic(capsys):
    code, a, _ = call(capsys, "verify", "--seed", "3", "--count", "5")
    _, b, _ = call(capsys, "verify", "--seed", "3", "--count", "5")
    assert code == 0 and a == b
    doc = json.loads(a)
    envelope_ok(doc, "verify")
    assert doc["result"]["total_violations"] == 0


def test_oracle(capsys):
    code, out, _ = call(capsys, "oracle", "--p", "6", "--omega", "1", "--lambda", "1")
    doc = json.loads(out)
    assert code == 0 and doc["result"]["passed"]
    assert doc["result"]["energy_rel_diff"] <= 1e-2
    assert doc["params"]["oracle"] is True


def test_build_id_fallback(monkeypatch):
    monkeypatch.delenv("CSGS_BUILD_ID")
    assert isinstance(build_id(), str) and build_id()


def test_module_entry_point(tmp_path):
    env = dict(os.environ, CSGS_BUILD_ID="x")
    proc = subprocess.run(
        [sys.executable, "-m", "csgs", "threshold", "--p", "3", "--q", "1", "--lambda", "2"],
        capture_output=True, text=True, env=env, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["result"]["omega_sharp"] == pytest.approx(0.25, abs=1e-9)
