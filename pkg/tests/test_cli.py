from __future__ import annotations

import csv
import io
import json
import subprocess
import sys

import pytest
from conftest import FIXTURES

from typmod.cli import EXIT_GUARD, EXIT_INCONSISTENT, EXIT_OK, EXIT_USAGE, main

EXPECTED = FIXTURES / "expected"
GOLDEN = ["ex31", "table1", "table1-prime", "policeman-d2-i0", "policeman-d2-i1", "policeman-d2-i2"]


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def unsat(tmp_path):
    p = tmp_path / "unsat.cnf"
    p.write_text("p cnf 1 2\n1 0\n-1 0\n")
    return p


@pytest.mark.parametrize("name", GOLDEN)
def test_typical_golden(capsys, name):
    code, out, _ = run(capsys, "typical", FIXTURES / f"{name}.cnf")
    assert code == EXIT_OK
    assert out == (EXPECTED / f"{name}.typical.txt").read_text()


def test_evidence_csv_golden(capsys):
    code, out, _ = run(capsys, "evidence", FIXTURES / "ex31.cnf", "--format", "csv")
    assert code == EXIT_OK
    assert out == (EXPECTED / "ex31.evidence.csv").read_text()


def test_count(capsys):
    assert run(capsys, "count", FIXTURES / "table1.cnf")[1] == "5\n"
    code, out, _ = run(capsys, "count", FIXTURES / "ex31.cnf", "--format", "json")
    assert json.loads(out) == {"models": 3}


def test_count_ledger(capsys):
    _, out, _ = run(capsys, "count", "--ledger", FIXTURES / "ex31.cnf", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert ["a", "2", "2"] in rows and ["-a", "1", "3"] in rows


def test_formula_evidence(capsys):
    code, out, _ = run(capsys, "evidence", FIXTURES / "ex31.cnf", "--formula", "a & b", "--format", "json")
    assert code == EXIT_OK
    assert "1/3" in out


def test_json_typical(capsys):
    _, out, _ = run(capsys, "typical", FIXTURES / "table1.cnf", "--format", "json")
    data = json.loads(out)
    assert data["summary"]["er_mtm"] == "1/6"
    assert data["summary"]["models"] == 5


def test_kernel_stability(capsys):
    code, out, _ = run(capsys, "kernel", FIXTURES / "table1.cnf", "--stability", "!p | !q | !r")
    assert code == EXIT_OK
    assert "violations: 0" in out and "guaranteed" in out


def test_standard_input(capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO((FIXTURES / "ex31.cnf").read_text()))
    assert run(capsys, "count", "-")[1] == "3\n"


# -- exit codes --------------------------------------------------------------------

def test_inconsistent_exit(capsys, unsat):
    for cmd in ("evidence", "typical", "kernel"):
        code, _, err = run(capsys, cmd, unsat)
        assert code == EXIT_INCONSISTENT and "inconsistent" in err
    assert run(capsys, "count", unsat)[1] == "0\n"


def test_usage_errors(capsys, tmp_path):
    assert run(capsys, "count", tmp_path / "missing.cnf")[0] == EXIT_USAGE
    bad = tmp_path / "bad.cnf"
    bad.write_text("p cnf 2 1\n1 x 0\n")
    assert run(capsys, "count", bad)[0] == EXIT_USAGE
    assert run(capsys, "frobnicate")[0] == EXIT_USAGE
    assert run(capsys, "evidence", FIXTURES / "ex31.cnf", "--formula", "a &")[0] == EXIT_USAGE


def test_guards(capsys):
    code, _, err = run(capsys, "sweep", "--axis", "ratio", "--grid", "2", "--vars", "41", "--samples", "1")
    assert code == EXIT_GUARD
    code, _, _ = run(capsys, "typical-models", FIXTURES / "policeman-d2-i2.cnf", "--cap", "10")
    assert code == EXIT_GUARD
    code, out, _ = run(capsys, "typical-models", FIXTURES / "policeman-d2-i2.cnf", "--cap", "10", "--force")
    assert code == EXIT_OK and out


def test_size_warning(capsys, caplog, tmp_path):
    big = tmp_path / "big.cnf"
    big.write_text("p cnf 61 1\n1 2 0\n")
    code, out, _ = run(capsys, "count", big)
    assert code == EXIT_OK and out == f"{3 * 2 ** 59}\n"
    assert "kind=size" in caplog.text


# -- environment overrides -----------------------------------------------------------

def test_env_format(capsys, monkeypatch):
    monkeypatch.setenv("TYPMOD_FORMAT", "json")
    _, out, _ = run(capsys, "count", FIXTURES / "ex31.cnf")
    assert json.loads(out) == {"models": 3}
    # an explicit flag wins
    assert run(capsys, "count", FIXTURES / "ex31.cnf", "--format", "table")[1] == "3\n"


def test_env_seed(capsys, monkeypatch):
    a = run(capsys, "gen", "--vars", "10", "--clauses", "20", "--seed", "7")[1]
    monkeypatch.setenv("TYPMOD_SEED", "7")
    assert run(capsys, "gen", "--vars", "10", "--clauses", "20")[1] == a


def test_env_branching_does_not_change_answers(capsys, monkeypatch):
    base = run(capsys, "typical", FIXTURES / "table1.cnf")[1]
    for b in ("frequency", "fail-first"):
        monkeypatch.setenv("TYPMOD_BRANCHING", b)
        assert run(capsys, "typical", FIXTURES / "table1.cnf")[1] == base


# -- gen, sweep, solve-m0 ----------------------------------------------------------

def test_gen_roundtrip(capsys, tmp_path):
    code, out, _ = run(capsys, "gen", "--vars", "12", "--ratio", "3", "--seed", "1")
    assert code == EXIT_OK
    p = tmp_path / "g.cnf"
    p.write_text(out)
    assert "p cnf 12 36" in out
    assert run(capsys, "count", p)[0] == EXIT_OK


def test_gen_impurity(capsys):
    code, out, _ = run(capsys, "gen", "--vars", "20", "--clauses", "85", "--imp", "0.5", "--seed", "3")
    assert code == EXIT_OK and out.count(" 0\n") == 85


def test_sweep_outputs(capsys, tmp_path):
    out_csv, dat = tmp_path / "s.csv", tmp_path / "s.dat"
    args = ["sweep", "--axis", "ratio", "--grid", "2", "4", "--vars", "8", "--samples", "5",
            "--seed", "1", "--no-timing", "--quiet", "--out", out_csv, "--dat", dat]
    assert run(capsys, *args)[0] == EXIT_OK
    first = out_csv.read_text()
    assert run(capsys, *args)[0] == EXIT_OK
    assert out_csv.read_text() == first
    assert first.startswith("axis,value,B,")
    assert dat.read_text().startswith("#")


def test_solve_m0(capsys):
    code, out, _ = run(capsys, "solve-m0", "--vars", "30")
    assert code == EXIT_OK and "0.43486" in out


# -- approximation ----------------------------------------------------------------

def test_approx_literal(capsys):
    code, out, _ = run(capsys, "approx", FIXTURES / "ex31.cnf", "--literal", "a", "--order", "2", "--exact")
    assert code == EXIT_OK
    last = out.strip().splitlines()[-1].split()
    assert last[3] == "True" and last[4] == last[5] == "2/3"


def test_approx_early(capsys):
    code, out, _ = run(capsys, "approx", FIXTURES / "table1.cnf", "--early", "--format", "csv")
    assert code == EXIT_OK
    rows = {r["variable"]: r for r in csv.DictReader(io.StringIO(out))}
    assert [rows[v]["value"] for v in "pqrsuv"] == ["-p", "q", "r", "s", "-u", "v"]
    assert all(int(r["tau0"]) <= int(r["tau_f"]) for r in rows.values())


# -- session ----------------------------------------------------------------------

def _queries(tmp_path):
    q = tmp_path / "q.txt"
    q.write_text("a\nb\n# skipped\na & b\n")
    return q


def test_session_batch_modes(capsys, tmp_path):
    q = _queries(tmp_path)
    _, out, _ = run(capsys, "session", FIXTURES / "ex31.cnf", "--queries", q, "--mode", "oblivious")
    obl = json.loads(out)
    assert [b["verdict"] for b in obl["trail"]] == ["true", "true", "false"]
    assert obl["jointly_consistent"] is False
    _, out, _ = run(capsys, "session", FIXTURES / "ex31.cnf", "--queries", q)
    non = json.loads(out)
    assert [b["evidence"] for b in non["trail"]] == ["2/3", "1/2", "1/1"]
    assert non["jointly_consistent"] is True


def test_session_floor(capsys, tmp_path):
    q = _queries(tmp_path)
    code, out, _ = run(capsys, "session", FIXTURES / "ex31.cnf", "--queries", q,
                       "--mode", "oblivious", "--floor", "0.9")
    assert code == EXIT_OK
    assert json.loads(out)["floor"] == "9/10"
    assert run(capsys, "session", FIXTURES / "ex31.cnf", "--queries", q, "--floor", "2")[0] == EXIT_USAGE


def test_session_repl(capsys, monkeypatch):
    script = "a\n:trail\n:check\n:mode oblivious\nb\n:floor 1/2\n:reset\nnope &\n:bogus\n:quit\nb\n"
    monkeypatch.setattr(sys, "stdin", io.StringIO(script))
    code, out, _ = run(capsys, "session", FIXTURES / "ex31.cnf")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0].startswith("true  2/3")
    assert "consistent" in lines and "mode=oblivious" in lines and "floor=1/2" in lines
    assert any(l.startswith("error:") for l in lines)
    assert any(l.startswith("commands:") for l in lines)
    assert lines[-1].startswith("commands:")  # nothing after :quit


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "typmod", "count", str(FIXTURES / "table1.cnf")],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "5\n"
