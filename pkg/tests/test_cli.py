import json
import subprocess
import sys

import numpy as np
import pytest

from cpnorm.channels import channel_from_dict, is_cp
from cpnorm.cli import main
from cpnorm.conditions import check_postr
from cpnorm.norms import OptimizerConfig, nu_p
from cpnorm.zoo import parse_zoo_spec


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def report(capsys, *argv):
    code, out = run(capsys, *argv)
    assert code == 0
    return json.loads(out)


def test_nu_identity(capsys):
    rep = report(capsys, "nu", "--zoo", "identity:2", "--p", "2", "--restarts", "8")
    assert rep["rows"][0]["value"] == pytest.approx(1, abs=1e-12)
    meta = rep["metadata"]
    assert meta["seed"] == 0 and meta["version"] and meta["config"]["zoo"] == "identity:2"
    assert "value_tol" in meta["tolerances"]


@pytest.mark.parametrize("spec, value", [("werner-holevo:3", 2**-0.5), ("depolarizing:2:0.5", 0.790569415)])
def test_nu_values(capsys, spec, value):
    rep = report(capsys, "nu", "--zoo", spec, "--p", "2", "--restarts", "16")
    assert rep["rows"][0]["value"] == pytest.approx(value, abs=1e-6)


def test_nu_matches_library_call(capsys):
    rep = report(capsys, "nu", "--zoo", "random:3:3:2:5", "--p", "3", "--restarts", "8", "--seed", "7")
    lib = nu_p(parse_zoo_spec("random:3:3:2:5").build(), 3.0, OptimizerConfig(restarts=8, seed=7))
    assert rep["rows"][0]["value"] == lib.value


def test_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("CPNORM_SEED", "11")
    rep = report(capsys, "nu", "--zoo", "identity:2", "--p", "2", "--restarts", "2")
    assert rep["metadata"]["seed"] == 11


def test_output_is_deterministic(capsys):
    args = ("nu", "--zoo", "random:2:2:2:1", "--p", "2.5", "--restarts", "8")
    assert run(capsys, *args)[1] == run(capsys, *args)[1]


def test_floats_have_17_digits(capsys):
    _, out = run(capsys, "nu", "--zoo", "depolarizing:2:0.5", "--p", "2", "--restarts", "4")
    line = next(l for l in out.splitlines() if '"value"' in l)
    digits = line.split(":")[1].strip().rstrip(",").replace(".", "").lstrip("0")
    assert len(digits) == 17


def test_norm_identity_exact(capsys):
    rep = report(capsys, "norm", "--q", "2", "--p", "2", "--zoo", "identity:3", "--restarts", "4")
    row = rep["rows"][0]
    assert row["exact"] == pytest.approx(1) and row["value"] == pytest.approx(1, abs=1e-9)


def test_norm_exact_vs_optimized(capsys):
    row = report(capsys, "norm", "--q", "2", "--p", "2", "--zoo", "random:3:3:2:9", "--restarts", "16")["rows"][0]
    assert abs(row["exact"] - row["value"]) <= 1e-8


def test_norm_restricted_matches_nu(capsys):
    a = report(capsys, "norm", "--q", "1", "--p", "2", "--restrict", "self-adjoint",
               "--zoo", "random:2:2:3:4", "--restarts", "16")["rows"][0]["value"]
    b = report(capsys, "nu", "--p", "2", "--zoo", "random:2:2:3:4", "--restarts", "16")["rows"][0]["value"]
    assert abs(a - b) <= 1e-6


def test_check_condition(capsys):
    row = report(capsys, "check-condition", "--zoo", "diagonal:A=2,-1;-1,2")["rows"][0]
    assert row["holds"] is True
    row = report(capsys, "check-condition", "--zoo", "werner-holevo:3")["rows"][0]
    assert row["holds"] is True


def test_check_condition_search(capsys):
    rows = report(capsys, "check-condition", "--zoo", "random:2:2:2:3", "--search", "--search-restarts", "3")["rows"]
    found = rows[1]
    U = np.array(found["unitary"])
    U = U[..., 0] + 1j * U[..., 1]
    chk = check_postr(parse_zoo_spec("random:2:2:2:3").build(), U)
    assert found["min_entry"] == pytest.approx(chk.min_entry, abs=1e-15)


def test_mult(capsys):
    row = report(capsys, "mult", "--zoo-a", "identity:2", "--zoo-b", "identity:2", "--p", "2", "--restarts", "4")["rows"][0]
    assert row["ratio"] == pytest.approx(1, abs=1e-9)
    row = report(capsys, "mult", "--zoo-a", "diagonal:A=1,0.5;0.5,1", "--zoo-b", "random:2:2:2:1",
                 "--p", "2", "--restarts", "8")["rows"][0]
    assert abs(row["ratio"] - 1) <= 1e-5


def test_mult_dimension_cap(capsys):
    code, _ = run(capsys, "mult", "--zoo-a", "random:9", "--zoo-b", "random:10", "--p", "2")
    assert code == 4


def test_sweep_csv_bracket(capsys):
    code, out = run(capsys, "sweep", "--zoo-a", "werner-holevo:3", "--zoo-b", "werner-holevo:3",
                    "--p-min", "4", "--p-max", "5.2", "--p-step", "0.1", "--bell-only", "--format", "csv",
                    "--restarts", "8")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "p,nu_A,nu_B,nu_AB,ratio,bell_ratio,converged"
    rows = [l.split(",") for l in lines[1:]]
    assert len(rows) == 13
    above = [float(r[0]) for r in rows if float(r[5]) > 1]
    below = [float(r[0]) for r in rows if float(r[5]) <= 1]
    assert 4.7 <= max(below) < min(above) <= 4.9


def test_sweep_identity_pair(capsys):
    rows = report(capsys, "sweep", "--zoo-a", "identity:2", "--zoo-b", "identity:2", "--grid", "1,2,3",
                  "--restarts", "4")["rows"]
    assert all(r["ratio"] == pytest.approx(1, abs=1e-9) for r in rows)


def test_zoo_round_trip(capsys, tmp_path):
    code, out = run(capsys, "zoo", "werner-holevo:3")
    ch = channel_from_dict(json.loads(out))
    assert ch.n_kraus == 3 and ch.kraus.shape[1:] == (3, 3)
    path = tmp_path / "wh.json"
    path.write_text(out)
    rep = report(capsys, "nu", "--file", str(path), "--p", "2", "--restarts", "8")
    assert rep["rows"][0]["value"] == pytest.approx(2**-0.5, abs=1e-9)


def test_zoo_identity_kraus(capsys):
    ch = channel_from_dict(json.loads(run(capsys, "zoo", "identity:2")[1]))
    assert ch.n_kraus == 1 and np.allclose(ch.kraus[0], np.eye(2))


def test_zoo_qubit_canonical_is_cp(capsys):
    ch = channel_from_dict(json.loads(run(capsys, "zoo", "qubit-canonical:t=0,0,0.3:lambda=0.5,0.5,0.4")[1]))
    assert is_cp(ch)


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "zoo", "bogus:2")[0] == 2
    assert run(capsys, "nu", "--zoo", "qubit-canonical:t=0,0,0.9:lambda=0.9,0.9,0.9", "--p", "2")[0] == 3
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "nu", "--file", str(bad), "--p", "2")[0] == 2
    assert run(capsys, "nu", "--file", str(tmp_path / "missing.json"), "--p", "2")[0] == 2
    choi = tmp_path / "transpose.json"
    T = np.eye(4)[[0, 2, 1, 3]]
    choi.write_text(json.dumps({"dim_in": 2, "choi": np.stack([T, 0 * T], -1).tolist()}))
    assert run(capsys, "nu", "--file", str(choi), "--p", "2")[0] == 3


def test_console_script_exit_code():
    proc = subprocess.run([sys.executable, "-m", "cpnorm.cli", "zoo", "bogus:1"], capture_output=True, text=True)
    assert proc.returncode == 2
    assert "unknown map family" in proc.stderr
