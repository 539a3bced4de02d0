import json
import subprocess
import sys

import pytest

from permhom.cli import run
from permhom.fraisse import ClassSpec
from permhom.lattice import boolean_square, chain
from permhom.report import SCHEMA
from permhom.sqorder import OrderedSpace, SubquotientOrder
from permhom.umetric import make_space


def call(capsys, *argv):
    code = run(list(argv))
    return code, capsys.readouterr().out


def call_json(capsys, *argv):
    code, out = call(capsys, "--json", *argv)
    return code, json.loads(out)


def test_majority_text(capsys):
    code, out = call(capsys, "majority", "3", "2", "1")
    assert code == 0
    assert "(+,+,+)" in out and "status: pass" in out


def test_types_count(capsys):
    code, rep = call_json(capsys, "types", "--k", "3", "--points", "3", "--count")
    assert code == 0 and rep["data"]["count"] == 36
    assert rep["schema"] == SCHEMA and rep["status"] == "pass"


def test_cases_verify_json(capsys):
    code, rep = call_json(capsys, "cases", "verify")
    assert code == 0 and rep["status"] == "pass"
    assert len(rep["items"]) == 9
    assert all(it["id"].startswith("case ") for it in rep["items"])


def test_single_case_and_division(capsys):
    code, rep = call_json(capsys, "cases", "verify", "--case", "1.2", "--mode", "refute")
    assert code == 0 and [it["id"] for it in rep["items"]] == ["case 1.2"]
    code, rep = call_json(capsys, "cases", "division")
    assert code == 0 and rep["status"] == "pass"


def test_json_is_byte_identical(capsys):
    a = call(capsys, "--json", "cases", "verify")[1]
    b = call(capsys, "--json", "cases", "verify")[1]
    assert a == b


@pytest.mark.parametrize("argv", [
    ["majority", "9", "2", "1"],
    ["types", "--k", "0", "--points", "3"],
    ["catalog", "build", "--id", "7z-1"],
    ["cases", "verify", "--case", "4.4"],
    ["lattice", "check", "/nonexistent.json"],
    ["gen4", "verify", "--k", "5", "--n", "3"],
    ["qsquare", "build", "--n", "1"],
    ["--threads", "0", "cases", "verify"],
    ["nosuchcommand"],
])
def test_bad_input_exits_2(capsys, argv):
    assert run(argv) == 2


def test_lattice_check(tmp_path, capsys):
    good = tmp_path / "b2.json"
    good.write_text(json.dumps(boolean_square().to_dict()))
    code, rep = call_json(capsys, "lattice", "check", str(good), "--distributive")
    assert code == 0
    assert rep["items"][0]["detail"]["meet_irreducibles"] == ["a", "b"]
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"size": 4, "covers": [[0, 2], [0, 3], [1, 2], [1, 3]]}))
    code, rep = call_json(capsys, "lattice", "check", str(bad))
    assert code == 1 and rep["status"] == "fail"
    bad.write_text("{not json")
    assert run(["lattice", "check", str(bad)]) == 2


def test_amalgamate_unordered(tmp_path, capsys):
    L = boolean_square()
    a, b = L.index("a"), L.index("b")
    prob = {"lattice": L.to_dict(), "base": {"dist": [[0, 3], [3, 0]]}, "row1": [a, b], "row2": [a, b]}
    f = tmp_path / "p.json"
    f.write_text(json.dumps(prob))
    code, rep = call_json(capsys, "amalgamate", "--problem", str(f))
    assert code == 0
    assert rep["items"][0]["detail"] == {"identified": True, "points": 3}
    assert rep["data"]["mapping"] == [0, 1, 2, 2]


def test_amalgamate_ordered(tmp_path, capsys):
    L = chain(3, ["0", "E", "1"])
    base = OrderedSpace(make_space(L, [[0]]), (SubquotientOrder(1, 2),))
    ext = lambda rel: OrderedSpace(make_space(L, [[0, 2], [2, 0]]), (SubquotientOrder(1, 2, frozenset(rel)),))
    prob = {"lattice": L.to_dict(), "base": base.to_dict(),
            "factor1": ext({(1, 0)}).to_dict(), "factor2": ext({(0, 1)}).to_dict()}
    f = tmp_path / "p.json"
    f.write_text(json.dumps(prob))
    code, rep = call_json(capsys, "amalgamate", "--problem", str(f), "--ordered")
    assert code == 0 and rep["items"][0]["detail"]["points"] == 3


def test_catalog_list_and_build(tmp_path, capsys):
    code, rep = call_json(capsys, "catalog", "list")
    assert code == 0 and len(rep["items"]) == 16
    out = tmp_path / "e.json"
    code, rep = call_json(capsys, "catalog", "build", "--id", "2b-1", "--size", "50", "--out", str(out))
    assert code == 0 and rep["items"][0]["detail"]["points"] >= 50
    saved = json.loads(out.read_text())
    assert "linear" in saved


def test_qsquare_and_generic(tmp_path, capsys):
    out = tmp_path / "q.json"
    code, rep = call_json(capsys, "qsquare", "build", "--n", "2", "--out", str(out))
    assert code == 0 and out.exists()
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps(ClassSpec.generic(2).to_dict()))
    code, rep = call_json(capsys, "generic", "--spec", str(spec), "--size", "12", "--depth", "1")
    assert code == 0 and "missing_extensions" in rep["data"]


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "permhom", "majority", "3", "2", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and "(+,+,+)" in proc.stdout
