import json

import pytest

from qpoisson.analysis import reference_circuit
from qpoisson.cli import main
from qpoisson.qasm import parse, serialize


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_n2(capsys):
    code, out, _ = run(capsys, "solve", "--n", "2")
    assert code == 0
    for value in ("0.204906", "0.304458", "0.160711"):
        assert value in out
    assert "success probability" in out


def test_solve_custom_b(tmp_path, capsys):
    f = tmp_path / "b.json"
    f.write_text(json.dumps({"n": 2, "b": [1, 2, 3]}))
    code, out, _ = run(capsys, "solve", "--n", "2", "--b-file", str(f))
    assert code == 0
    assert "max abs difference" in out


def test_solve_bad_b_file(tmp_path, capsys):
    f = tmp_path / "b.json"
    f.write_text(json.dumps({"n": 2, "b": [1, 2]}))
    code, _, err = run(capsys, "solve", "--n", "2", "--b-file", str(f))
    assert code == 1 and err.startswith("error: solve:")
    f.write_text("{oops")
    code, _, err = run(capsys, "solve", "--n", "2", "--b-file", str(f))
    assert code == 1 and "io:" in err


def test_parse_round_trips(tmp_path, capsys):
    f = tmp_path / "x.qasm"
    f.write_text(serialize(reference_circuit(2)))
    code, out, _ = run(capsys, "parse", str(f))
    assert code == 0
    assert parse(out) == reference_circuit(2)


def test_parse_error_exit_one(tmp_path, capsys):
    f = tmp_path / "bad.qasm"
    f.write_text("qreg q[2];\nfoo q[0];\n")
    code, _, err = run(capsys, "parse", str(f))
    assert code == 1
    assert "parse:" in err and "line 2" in err


def test_simulate_builtin_exact_and_shots(capsys):
    code, out, _ = run(capsys, "simulate", "listing_n2")
    assert code == 0 and out.strip()
    code, a, _ = run(capsys, "simulate", "listing_n2", "--shots", "500", "--seed", "4")
    code, b, _ = run(capsys, "simulate", "listing_n2", "--shots", "500", "--seed", "4")
    assert a == b
    assert sum(int(line.split()[1]) for line in a.splitlines()) == 500


def test_metrics(capsys):
    code, out, _ = run(capsys, "metrics", "listing_n3")
    assert code == 0
    assert json.loads(out)["one_two_qubit_gate_count"] == 215


def test_sweep_single_cell(capsys):
    code, out, _ = run(capsys, "sweep", "--n", "2", "--noise", "pd", "--i-min", "1", "--i-max", "1")
    assert code == 0
    rows = out.strip().splitlines()[1:]
    assert len(rows) == 3
    dbar = float(rows[0].split(",")[-1])
    # order-of-magnitude agreement with the tabulated 0.0206
    assert 0 < dbar < 0.06


def test_sweep_writes_files_via_env(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("QPOISSON_OUT_DIR", str(tmp_path))
    code, _, _ = run(capsys, "sweep", "--n", "2", "--noise", "bf", "--i-min", "8", "--i-max", "9")
    assert code == 0
    assert (tmp_path / "sweep_n2_bf.csv").read_text().startswith("noise,i,p,basis,D,Dbar")
    summary = json.loads((tmp_path / "sweep_n2_bf.json").read_text())
    assert summary["target"] == 0.1


@pytest.mark.parametrize("argv", [
    [], ["frobnicate"], ["solve"], ["sweep", "--n", "4"], ["sweep", "--n", "2", "--noise", "zz"],
    ["sweep", "--n", "2", "--i-min", "5", "--i-max", "2"], ["simulate", "x", "--shots", "0"],
])
def test_usage_errors_exit_two(argv, capsys):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


def test_missing_file(capsys):
    code, _, err = run(capsys, "metrics", "/no/such/file.qasm")
    assert code == 1 and "io:" in err
