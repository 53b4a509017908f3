import csv
import io
import json

import numpy as np
import pytest

from dziobek.cli import main
from dziobek.solver import euler_collinear_configurations


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out


def write_input(tmp_path, payload, name="input.json"):
    path = tmp_path / name
    path.write_text(payload if isinstance(payload, str) else json.dumps(payload))
    return str(path)


def euler_payload(a=-1.5):
    cfg = euler_collinear_configurations(np.array([1.0, 2.0, 3.0]), a)[0]
    return {
        "masses": [1.0, 2.0, 3.0],
        "a": a,
        "positions": [[float(v) for v in row] for row in cfg.x],
    }


def test_bound_output(capsys):
    code, out = run_cli(capsys, "bound", "--n", "4")
    assert code == 0
    assert out == "2^13 = 8192\n"
    code, out = run_cli(capsys, "bound", "--n", "3")
    assert out == "2^8 = 256\n"
    code, _ = run_cli(capsys, "bound", "--n", "2")
    assert code == 2


def test_solve_json_document(capsys):
    code, out = run_cli(
        capsys,
        "solve",
        "--masses",
        "1,2,3",
        "--a",
        "newton",
        "--starts",
        "200",
        "--seed",
        "1",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["schema"] == "dziobek/1"
    assert doc["kind"] == "solve"
    assert doc["meta"]["n"] == 3
    assert doc["meta"]["a"] == -1.5
    assert doc["meta"]["starts"] == 200
    assert doc["bound"] == {"exponent": 8, "decimal": "256"}
    assert doc["class_count"] == 3
    for row in doc["classes"]:
        assert row["certificate"]["accepted"] is True
        assert set(row["distances"]) == {"d_12", "d_13", "d_23"}
        assert row["key"] == sorted(row["key"]) or len(row["key"]) == 3
        assert row["multiplicity_found"] >= 1
    # classes arrive sorted by canonical key
    keys = [tuple(row["key"]) for row in doc["classes"]]
    assert keys == sorted(keys)


def test_solve_byte_deterministic(capsys):
    argv = ("solve", "--n", "3", "--equal", "--a", "-1.5", "--starts", "150")
    code1, out1 = run_cli(capsys, *argv)
    code2, out2 = run_cli(capsys, *argv)
    assert code1 == code2 == 0
    assert out1 == out2


def test_solve_csv_format(capsys):
    code, out = run_cli(
        capsys,
        "solve",
        "--masses",
        "1,2,3",
        "--a",
        "newton",
        "--starts",
        "150",
        "--format",
        "csv",
    )
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][:4] == ["class_key", "d_12", "d_13", "d_23"]
    assert rows[0][4:] == [
        "kappa",
        "degeneracy_index",
        "isolated",
        "cc_residual",
        "dziobek_residual",
        "rank1_residual",
        "veronese_residual",
    ]
    assert len(rows) == 4  # header + 3 classes
    for row in rows[1:]:
        assert float(row[4]) != 0.0  # kappa
        assert row[6] == "True"


def test_solve_input_validation(capsys):
    code, _ = run_cli(capsys, "solve", "--a", "newton")
    assert code == 2  # neither --masses nor --equal
    code, _ = run_cli(capsys, "solve", "--equal", "--a", "newton")
    assert code == 2  # --equal without --n
    code, _ = run_cli(capsys, "solve", "--n", "2", "--equal", "--a", "newton")
    assert code == 2  # n too small
    code, _ = run_cli(
        capsys, "solve", "--masses", "1,2", "--n", "3", "--a", "newton"
    )
    assert code == 2  # inconsistent lengths
    code, _ = run_cli(capsys, "solve", "--masses", "1,-2,3", "--a", "newton")
    assert code == 2  # nonpositive mass
    code, _ = run_cli(capsys, "solve", "--n", "3", "--equal", "--a", "0")
    assert code == 2  # exponent zero has no potential


def test_solve_out_file(capsys, tmp_path):
    out_path = tmp_path / "doc.json"
    code, out = run_cli(
        capsys,
        "solve",
        "--n",
        "3",
        "--equal",
        "--a",
        "vortex",
        "--starts",
        "100",
        "--out",
        str(out_path),
    )
    assert code == 0
    assert out_path.read_text() == out


def test_certify_accept(capsys, tmp_path):
    path = write_input(tmp_path, euler_payload())
    code, out = run_cli(capsys, "certify", "--input", path)
    assert code == 0
    doc = json.loads(out)
    assert doc["kind"] == "certificate"
    assert doc["accepted"] is True
    assert doc["cc_residual"] < 1e-10
    assert doc["failures"] == []


def test_certify_alias_a(capsys, tmp_path):
    payload = euler_payload()
    payload["a"] = "newton"
    path = write_input(tmp_path, payload)
    code, out = run_cli(capsys, "certify", "--input", path)
    assert code == 0


def test_certify_reject(capsys, tmp_path):
    payload = euler_payload()
    payload["positions"][1][0] += 1e-3
    path = write_input(tmp_path, payload)
    code, out = run_cli(capsys, "certify", "--input", path)
    assert code == 1
    doc = json.loads(out)
    assert doc["accepted"] is False
    assert "cc-residual" in doc["failures"]


def test_certify_wrong_dimension(capsys, tmp_path):
    payload = {
        "masses": [1.0, 1.0, 1.0],
        "a": -1.5,
        "positions": [[0.0, 0.0], [1.0, 0.0], [0.5, 0.9]],
    }
    path = write_input(tmp_path, payload)
    code, out = run_cli(capsys, "certify", "--input", path)
    assert code == 1
    doc = json.loads(out)
    assert doc["error"] == "wrong-dimension"
    assert doc["measured_dim"] == 2
    assert doc["expected_dim"] == 1


def test_certify_malformed_inputs(capsys, tmp_path):
    code, _ = run_cli(capsys, "certify", "--input", str(tmp_path / "nope.json"))
    assert code == 2  # unreadable file
    path = write_input(tmp_path, "{not json", name="broken.json")
    code, _ = run_cli(capsys, "certify", "--input", path)
    assert code == 2  # parse error with line/col diagnostics
    path = write_input(tmp_path, {"masses": [1, 1, 1], "a": -1.5}, name="m.json")
    code, _ = run_cli(capsys, "certify", "--input", path)
    assert code == 2  # missing positions
    path = write_input(
        tmp_path,
        {"masses": [1, 1, 1], "a": -1.5, "positions": [[0.0], [1.0]]},
        name="shape.json",
    )
    code, _ = run_cli(capsys, "certify", "--input", path)
    assert code == 2  # wrong row count
    payload = euler_payload()
    payload["a"] = 0
    path = write_input(tmp_path, payload, name="a0.json")
    code, _ = run_cli(capsys, "certify", "--input", path)
    assert code == 2  # a = 0 kills the whole residual, not a valid exponent


def test_sweep_json(capsys):
    code, out = run_cli(
        capsys,
        "sweep",
        "--n",
        "3",
        "--a",
        "newton",
        "--trials",
        "2",
        "--seed",
        "6",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["kind"] == "sweep"
    assert doc["trial_count"] == 2
    assert all(t["class_count"] == 3 for t in doc["trials"])


def test_sweep_csv(capsys):
    code, out = run_cli(
        capsys,
        "sweep",
        "--n",
        "3",
        "--a",
        "newton",
        "--trials",
        "2",
        "--seed",
        "6",
        "--format",
        "csv",
    )
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert len(rows) == 3
    assert "class_count" in rows[0]


def test_sweep_validation(capsys):
    code, _ = run_cli(capsys, "sweep", "--n", "9", "--a", "newton", "--trials", "1")
    assert code == 2
    code, _ = run_cli(capsys, "sweep", "--n", "3", "--a", "newton", "--trials", "0")
    assert code == 2


def test_oracle_document(capsys):
    code, out = run_cli(capsys, "oracle", "--n", "3", "--equal", "--a", "newton")
    assert code == 0
    doc = json.loads(out)
    assert doc["kind"] == "oracle"
    assert [s["middle_body"] for s in doc["solutions"]] == [1, 2, 3]
    L = (10.0 / 3.0) ** (1.0 / 3.0)
    for sol in doc["solutions"]:
        assert sorted(sol["distances"].values())[2] == pytest.approx(L, rel=1e-12)
    code, _ = run_cli(capsys, "oracle", "--masses", "1,2,3,4", "--a", "newton")
    assert code == 2


def test_unknown_subcommand_and_help(capsys):
    code = main(["frobnicate"])
    capsys.readouterr()
    assert code == 2
    code = main(["--help"])
    out = capsys.readouterr().out
    assert code == 0
    assert "solve" in out and "certify" in out


def test_numeric_failure_exit_code(capsys, tmp_path):
    # coincident bodies pass input validation but blow up in the pipeline
    payload = {
        "masses": [1.0, 1.0, 1.0, 1.0],
        "a": -1.5,
        "positions": [[0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
    }
    path = write_input(tmp_path, payload)
    code, _ = run_cli(capsys, "certify", "--input", path)
    assert code == 3
