import json
import subprocess
import sys

import pytest

from multadv.cli import main


def run_json(capsys, *argv):
    code = main([*argv, "--json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_bound_mult(capsys):
    code, rep = run_json(capsys, "bound", "mult", "--family", "search", "--n", "4", "--q", "2", "--zeta", "0.9")
    assert code == 0
    assert rep["quantities"]["value"] == pytest.approx(0.80, abs=5e-3)
    assert rep["quantities"]["eta"] == pytest.approx(0.25)


def test_bound_additive_star(capsys):
    code, rep = run_json(capsys, "bound", "additive", "--family", "or", "--n", "4", "--epsilon", "0.0",
                         "--gamma", "star")
    assert code == 0 and rep["quantities"]["value"] == pytest.approx(1.0)


def test_bound_mult_trivial_ratio(capsys):
    code, rep = run_json(capsys, "bound", "mult", "--family", "search", "--n", "4", "--q", "1")
    assert code == 2 and rep["error"]["type"] == "TrivialRatio"


def test_bound_mult2(capsys):
    code, rep = run_json(capsys, "bound", "mult2", "--family", "threshold", "--n", "6", "--t", "2", "--zeta", "0.9")
    assert code == 0 and rep["quantities"]["value"] > 0


def test_bound_from_file(tmp_path, capsys):
    p = tmp_path / "f.txt"
    p.write_text("2 2\n00 A\n01 B\n10 B\n11 A\n")
    code, rep = run_json(capsys, "bound", "additive", "--file", str(p))
    assert code == 0 and rep["quantities"]["value"] > 0
    code, rep = run_json(capsys, "bound", "additive", "--file", str(tmp_path / "missing.txt"))
    assert code == 2


def test_verify_block_suite(capsys):
    code, rep = run_json(capsys, "verify", "lemma1", "--family", "tfold", "--n", "6", "--t", "2", "--q", "2")
    assert code == 0 and rep["passed"]
    eq = [c for c in rep["checks"] if c["name"].startswith("equality")]
    assert eq and all(c["residual"] <= 1e-9 for c in eq)


def test_verify_thm2(capsys):
    code, rep = run_json(capsys, "verify", "thm2", "--family", "search", "--n", "4", "--q", "2", "--seeds", "50")
    assert code == 0
    ratio_checks = [c for c in rep["checks"] if c["name"].startswith("ratio seed=")]
    assert len(ratio_checks) == 50 and all(c["passed"] for c in ratio_checks)


def test_verify_dpt(capsys):
    code, rep = run_json(capsys, "verify", "dpt", "--family", "search", "--n", "4", "--q", "2", "--k", "2")
    assert code == 0
    norm = next(c for c in rep["checks"] if c["name"] == "norm identity")
    assert norm["residual"] <= 1e-9


@pytest.mark.parametrize("suite", ["thm1", "eta", "eigs"])
def test_verify_other_suites(capsys, suite):
    code, rep = run_json(capsys, "verify", suite, "--family", "search", "--n", "4", "--seeds", "5")
    assert code == 0 and rep["passed"]


def test_simulate_grover(capsys, tmp_path):
    out = tmp_path / "trace.csv"
    code, rep = run_json(capsys, "simulate", "grover", "--n", "4", "--iters", "1", "--gamma", "search:q=2",
                         "--out", str(out))
    q = rep["quantities"]
    assert code == 0 and q["success"] == pytest.approx(1.0) and "progress_threshold" in q
    assert out.read_text().splitlines()[0] == "step,W,ratio,difference"
    code, rep = run_json(capsys, "simulate", "grover", "--n", "4", "--iters", "0")
    assert rep["quantities"]["success"] == pytest.approx(0.25)


def test_simulate_random(capsys):
    code, rep = run_json(capsys, "simulate", "random", "--seed", "7", "--T", "5", "--family", "search", "--n", "4")
    assert code == 0 and all(c["passed"] for c in rep["checks"])
    assert len(rep["quantities"]["W"]) == 6


def test_text_output(capsys):
    assert main(["bound", "mult", "--family", "search", "--n", "4", "--zeta", "0.9"]) == 0
    assert "value" in capsys.readouterr().out


def test_json_deterministic():
    cmd = [sys.executable, "-m", "multadv", "simulate", "random", "--seed", "3", "--family", "search", "--n", "4",
           "--json"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a


def test_logs_stay_off_stdout():
    cmd = [sys.executable, "-m", "multadv", "bound", "mult", "--family", "search", "--q", "1", "--json"]
    res = subprocess.run(cmd, capture_output=True)
    assert res.returncode == 2
    json.loads(res.stdout)
    assert "DegenerateAdversaryWarning" in res.stderr.decode()
