import json
import subprocess
import sys

import pytest

from schema_check import validate
from syllog.cli import main


def write(tmp_path, name, text):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_solve_unsat(tmp_path, capsys):
    f = write(tmp_path, "u.3lqs", "(forall z)(z in X) & !(x in X)\n")
    assert main(["solve", f]) == 20
    assert capsys.readouterr().out.startswith("UNSAT")


def test_solve_sat_writes_witness(tmp_path):
    f = write(tmp_path, "s.3lqs", "x in X & !(y in X)\n")
    w, j = str(tmp_path / "w.json"), str(tmp_path / "v.json")
    assert main(["solve", f, "--witness", w, "--json", j]) == 10
    validate("interpretation", json.loads(open(w).read()))
    validate("verdict", json.loads(open(j).read()))


def test_solve_json_is_deterministic(tmp_path):
    f = write(tmp_path, "s.3lqs", "(forall Z)(Z in A -> (forall z)(z in Z -> z in X)) & Y in A & y in Y\n")
    outs = []
    for i in range(2):
        j = str(tmp_path / f"v{i}.json")
        assert main(["solve", f, "--json", j]) == 10
        outs.append(open(j).read())
    assert outs[0] == outs[1]


def test_solve_unknown_with_cap(tmp_path):
    f = write(tmp_path, "c.3lqs", "!(x = y) & !(y = w) & !(x = w)\n")
    assert main(["solve", f, "--max-domain", "2"]) == 30


def test_solve_outside_fragment_is_input_error(tmp_path):
    f = write(tmp_path, "r.3lqs", "(forall Z)(Z in A -> (forall z)(z in Z)) & X in A & !(x in X)\n")
    assert main(["solve", f]) == 3
    assert main(["solve", f, "--allow-unrestricted", "--max-domain", "2"]) == 30


def test_solve_h(tmp_path):
    f = write(tmp_path, "h.3lqs", "(forall z)(z in X_U) & (forall Z)(Z in A_pi <-> (forall z1 z2)"
                                  "((z1 in Z & z2 in Z) -> z1 = z2)) & x = x\n")
    assert main(["solve-h", f, "--h", "2"]) == 10
    assert main(["solve-h", f, "--h", "2", "--method", "branch"]) == 10


def test_check_restriction(tmp_path, capsys):
    f = write(tmp_path, "p.3lqs", "(forall Z)(Z in A <-> (forall z)(z in Z -> z in X))\n")
    j = str(tmp_path / "r.json")
    assert main(["check-restriction", f, "--json", j]) == 0
    out = capsys.readouterr().out
    assert "certified-by-schema" in out and "member" in out
    validate("report", json.loads(open(j).read()))


def test_normalize_roundtrip(tmp_path, capsys):
    f = write(tmp_path, "n.3lqs", "!((forall z)(z in X)) | X = Y\n")
    out = str(tmp_path / "o.3lqs")
    assert main(["normalize", f, "--out", out]) == 0
    assert "!(z#1 in X)" in capsys.readouterr().out


def test_bound_worked_instance(tmp_path, capsys):
    f = write(tmp_path, "b.3lqs", "x in X & X in A & (forall Z)(Z in A -> (forall z)(z in Z -> z in Y))\n")
    assert main(["bound", f]) == 0
    assert "|W0|=1 |W1|=2 |Phi|=1 max_m=1 max_n=1 bound=4" in capsys.readouterr().out


def test_relativize(tmp_path, capsys):
    f = write(tmp_path, "r.3lqs", "x in X\n")
    m = write(tmp_path, "m.json", json.dumps({"domain_size": 4, "m0": {"x": 2}, "m1": {"X": [0, 2]}}))
    j = str(tmp_path / "o.json")
    assert main(["relativize", f, m, "--json", j]) == 0
    doc = json.loads(open(j).read())
    validate("domain_witness_set", doc["domain_witness_set"])
    validate("interpretation", doc["interpretation"])
    assert doc["domain_witness_set"]["elements"] == [2]


def test_relativize_precondition(tmp_path):
    f = write(tmp_path, "r.3lqs", "x in X\n")
    m = write(tmp_path, "m.json", json.dumps({"domain_size": 2, "m0": {"x": 1}, "m1": {"X": [0]}}))
    assert main(["relativize", f, m]) == 3


def test_encode(tmp_path, capsys):
    assert main(["encode", "--kind", "powerset", "--vars", "A,X"]) == 0
    assert "(forall Z)(Z in A <-> (forall z)(z in Z -> z in X))" in capsys.readouterr().out
    assert main(["encode", "--kind", "pow-le-h", "--h", "2"]) == 0
    assert main(["encode", "--kind", "set-former", "--body", "!(z in Y)"]) == 0


def test_s5_valid(tmp_path, capsys):
    f = write(tmp_path, "t.s5", "[]p -> p\n")
    assert main(["s5", "--check", "valid", f]) == 0
    assert capsys.readouterr().out.strip() == "valid"


def test_s5_invalid_and_sat(tmp_path):
    f = write(tmp_path, "t.s5", "<>p -> p\n")
    assert main(["s5", "--check", "valid", f]) == 1
    assert main(["s5", "--check", "sat", f]) == 10
    tr = str(tmp_path / "tr.3lqs")
    assert main(["s5", f, "--emit-translation", tr]) == 10
    assert "A_pi3" in open(tr).read()


def test_selftest_green(capsys):
    assert main(["selftest", "--budget", "20"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") >= 8


@pytest.mark.parametrize("argv", [[], ["nope"], ["solve"], ["selftest", "--suite", "nope"]])
def test_usage_errors(argv):
    assert main(argv) in (2, 3)


def test_unknown_suite_is_input_error():
    assert main(["selftest", "--suite", "nope"]) == 3


def test_missing_file():
    assert main(["solve", "/nonexistent/f.3lqs"]) == 3


def test_parse_error(tmp_path, capsys):
    f = write(tmp_path, "bad.3lqs", "x in (\n")
    assert main(["solve", f]) == 3
    assert "1:" in capsys.readouterr().err


def test_help():
    assert main(["--help"]) == 0


def test_module_entry_point(tmp_path):
    f = write(tmp_path, "u.3lqs", "X = Y & !(X = Y)\n")
    r = subprocess.run([sys.executable, "-m", "syllog", "solve", f], capture_output=True, text=True)
    assert r.returncode == 20
