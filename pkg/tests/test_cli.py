import json
import subprocess
import sys
from pathlib import Path

import pytest

from sheafpair.cli import main
from sheafpair.suites import Case, write_reproducer
from sheafpair.workspace import WorkspaceError, load_workspace

ROOT = Path(__file__).resolve().parents[1]
WS = ROOT / "workspaces"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_validate_constant_sheaf_workspace(capsys):
    code, out, _ = run(capsys, "validate", WS / "constant_sierpinski.json", "--json")
    assert code == 0 and json.loads(out)["ok"] is True


def test_validate_broken_chain(capsys):
    code, out, err = run(capsys, "validate", WS / "broken_chain.json", "--json")
    assert code == 1
    viol = json.loads(out)["reports"]["sheaf:E"]["violations"]
    assert viol[0]["kind"] == "COMPOSITION" and viol[0]["where"] == [3, 2, 1]
    assert "COMPOSITION" in err


def test_malformed_json_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run(capsys, "validate", bad)
    assert code == 2 and "line 1" in err


def test_parse_error_names_location(tmp_path, capsys):
    doc = {"ring": "QQ", "space": "point", "sheaves": {"E": {"free": 2}},
           "pairings": {"P": {"E": "E", "gram": [[1, "x"], [0, 1]]}}}
    path = tmp_path / "w.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "validate", path)
    assert code == 2 and "$.pairings.P.gram" in err


def test_compute_radical(capsys):
    code, out, _ = run(capsys, "compute", WS / "symplectic2.json", "radical", "pairing=P", "sub=S", "--json")
    assert code == 0 and json.loads(out)["rank"] == 0


def test_compute_witt(capsys):
    code, out, _ = run(capsys, "compute", WS / "symplectic4.json", "witt", "pairing=J", "iso=F")
    res = json.loads(out)
    assert code == 0 and res["verified"] is True and len(res["planes"]) == 2
    assert res["planes"][0] == {"r": ["1", "0", "0", "0"], "s": ["0", "1", "0", "0"], "c": "1"}


def test_compute_codim(capsys):
    code, out, _ = run(capsys, "compute", WS / "symplectic4.json", "codim", "sheaf=E", "sub=S")
    assert code == 0 and json.loads(out)["top"] == [1, 3, 3, 1]


def test_compute_errors(capsys):
    code, out, err = run(capsys, "compute", WS / "symplectic4.json", "split", "pairing=J", "sub=S")
    assert code == 1 and json.loads(out)["error"] == "ISOTROPIC_INPUT"
    code, _, err = run(capsys, "compute", WS / "symplectic4.json", "frobnicate")
    assert code == 2 and "unknown operation" in err
    code, _, err = run(capsys, "compute", WS / "symplectic4.json", "witt", "pairing=J")
    assert code == 2 and "iso" in err
    code, _, err = run(capsys, "compute", WS / "symplectic4.json", "witt", "pairing=Nope", "iso=F")
    assert code == 2


def test_ring_override(capsys):
    code, out, _ = run(capsys, "compute", WS / "symplectic4.json", "nondegenerate", "pairing=J", "--ring", "zz")
    assert code == 0 and json.loads(out) == {"nondegenerate": True, "unimodular": True}


def test_prove_vacuous_pass(capsys):
    code, out, err = run(capsys, "prove", "biorthogonality", "--cases", "0")
    assert code == 0 and "warning" in json.loads(out) and "warning" in err


def test_prove_unknown_suite(capsys):
    code, _, _ = run(capsys, "prove", "nonsense", "--cases", "1")
    assert code == 2


def test_prove_small_runs(capsys, tmp_path):
    code, out, _ = run(capsys, "prove", "all", "--cases", "3", "--seed", "7", "--out", tmp_path)
    res = json.loads(out)
    assert code == 0 and res["ok"] and len(res["suites"]) == 11
    assert not any(tmp_path.iterdir())


def test_reproducer_retriggers_failure(tmp_path, capsys):
    # a presheaf that does not glue, packaged exactly as a failing suite case would be
    doc = {"ring": "QQ", "space": {"points": 2, "opens": [[], [0], [1], [0, 1]]},
           "sheaves": {"E": {"ranks": [0, 1, 1, 0]}}}
    path = write_reproducer(str(tmp_path), "sheaf", 1, 0, Case(doc, "sheaf-axioms", {"sheaf": "E"}))
    code, out, _ = run(capsys, "compute", path, "--json")
    assert code == 1
    kinds = {v["kind"] for v in json.loads(out)["report"]["violations"]}
    assert "GLUING" in kinds


def test_stdout_is_byte_identical_across_runs():
    cmd = [sys.executable, "-m", "sheafpair", "prove", "witt", "--cases", "5", "--seed", "3",
           "--max-rank", "8"]
    first = subprocess.run(cmd, capture_output=True, cwd=ROOT)
    second = subprocess.run(cmd, capture_output=True, cwd=ROOT)
    assert first.returncode == 0
    assert first.stdout == second.stdout
    cmd = [sys.executable, "-m", "sheafpair", "compute", str(WS / "symplectic4.json"), "witt",
           "pairing=J", "iso=F"]
    assert subprocess.run(cmd, capture_output=True).stdout == subprocess.run(cmd, capture_output=True).stdout


def test_workspace_rejects_duplicate_names():
    doc = {"sheaves": {"E": {"free": 1}}, "matrices": {"E": [[1]]}}
    with pytest.raises(WorkspaceError):
        load_workspace(doc)


def test_workspace_per_open_gram_and_parts():
    doc = {"ring": "QQ", "space": "sierpinski", "sheaves": {"E": {"constant": 1}},
           "pairings": {"P": {"E": "E", "gram": {"1": [[2]], "2": [[2]]}}},
           "submodules": {"S": {"sheaf": "E", "parts": {"1": [[1]], "2": [[1]]}}}}
    ws = load_workspace(doc)
    assert ws.pairings["P"].gram[0].shape == (0, 0)
    assert ws.submodule("S")[0].rank == 0
