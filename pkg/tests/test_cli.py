import json
import shutil
import subprocess
import sys

import pytest

from orbicat.cli import main
from conftest import DATA

ALG = DATA / "algebras"
SURF = DATA / "surfaces"
CAT = DATA / "categories"
BIM = DATA / "bimodules"
THETA = DATA / "theta"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def test_frob_check_lists_axioms(capsys):
    code, rep, _ = run(capsys, "frob", "check", "--input", ALG / "m2.json")
    assert code == 0 and rep["verdict"] == "valid"
    assert "frobenius-identity" in rep["axioms"]


def test_classify_o2_transpose(capsys):
    code, rep, _ = run(capsys, "classify", "--structure", "o2", "--input", ALG / "m2.json",
                       "--theta", THETA / "transpose.json")
    assert code == 0 and rep["verdict"] == "valid"


def test_classify_o2_identity_witness(capsys):
    code, rep, _ = run(capsys, "classify", "--structure", "o2", "--input", ALG / "m2.json",
                       "--theta", THETA / "identity.json")
    assert code == 1
    assert rep["witnesses"] == [{"error": "NotAntiHomomorphism", "pair": ["E12", "E21"]}]


@pytest.mark.parametrize("argv,code", [
    (["classify", "--structure", "so2", "--input", ALG / "m2.json"], 0),
    (["classify", "--structure", "so2", "--input", ALG / "m2u.json"], 1),
    (["classify", "--structure", "spin:2", "--input", ALG / "cl1.json"], 0),
    (["classify", "--structure", "spin:1", "--input", ALG / "cl1.json"], 1),
    (["classify", "--structure", "spin:1", "--input", ALG / "m2u.json", "--mode", "inner"], 0),
    (["frob", "separable", "--input", ALG / "m2u.json"], 1),
    (["frob", "nakayama", "--input", ALG / "m2u.json"], 0),
    (["frob", "spin", "--input", ALG / "cl1.json", "--r", "2"], 0),
    (["frob", "tensor", "--input", BIM / "row2.json", "--right", BIM / "col2.json"], 0),
    (["frob", "adjoint", "--input", BIM / "col2.json"], 0),
    (["cat", "check", "--input", CAT / "s3-twisted.json"], 0),
    (["cat", "strictify", "--input", CAT / "z2.json"], 0),
    (["cat", "karoubi", "--input", CAT / "rectangular-band.json"], 0),
    (["cat", "karoubi", "--input", CAT / "s3-twisted.json"], 1),
    (["cat", "psi-check", "--input", CAT / "groupoid.json"], 0),
    (["statesum", "--algebra", ALG / "m2.json", "--surface", SURF / "klein-fan.json"], 1),
])
def test_exit_codes(capsys, argv, code):
    got, rep, _ = run(capsys, *argv)
    assert got == code
    if rep.get("verdict") == "invalid":
        assert rep["witnesses"]


def test_statesum_value_only(capsys):
    code, rep, _ = run(capsys, "statesum", "--algebra", ALG / "m2.json", "--surface",
                       SURF / "sphere.json")
    assert code == 0 and rep == {"value": "4"}
    code, rep, _ = run(capsys, "statesum", "--algebra", ALG / "m2.json", "--surface",
                       SURF / "klein-cone.json", "--theta", THETA / "transpose.json")
    assert code == 0 and set(rep) == {"value"}


def test_nakayama_values(capsys):
    _, rep, _ = run(capsys, "frob", "nakayama", "--input", ALG / "m2u.json")
    assert rep["nakayama"]["E12"] == ["0", "2", "0", "0"]
    assert rep["nakayama"]["E21"] == ["0", "0", "1/2", "0"]
    assert rep["symmetric"] is False


def test_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, rep, err = run(capsys, "frob", "check", "--input", bad)
    assert code == 2 and rep["verdict"] == "error"
    assert "invalid JSON" in err


def test_missing_file(tmp_path, capsys):
    code, _, err = run(capsys, "frob", "check", "--input", tmp_path / "nope.json")
    assert code == 2 and "cannot read" in err


def test_structurally_malformed_algebra(tmp_path, capsys):
    bad = tmp_path / "alg.json"
    bad.write_text(json.dumps({"field": "Q", "dim": 2}))
    code, _, _ = run(capsys, "frob", "check", "--input", bad)
    assert code == 2


def test_degenerate_algebra_is_invalid_not_malformed(tmp_path, capsys):
    data = {"field": "Q", "dim": 2, "labels": ["1", "x"], "unit": ["1", "0"],
            "structure_constants": [[0, 0, 0, "1"], [0, 1, 1, "1"], [1, 0, 1, "1"]],
            "counit": ["1", "0"]}
    p = tmp_path / "dual_numbers.json"
    p.write_text(json.dumps(data))
    code, rep, _ = run(capsys, "frob", "check", "--input", p)
    assert code == 1 and rep["witnesses"][0]["error"] == "DegeneratePairing"


def test_bad_usage(capsys):
    assert main(["frob"]) == 2
    assert main(["classify", "--structure", "bogus", "--input", str(ALG / "q.json")]) == 2


def test_field_selector(monkeypatch, capsys):
    monkeypatch.setenv("ORBICAT_FIELD", "R")
    code, _, err = run(capsys, "frob", "check", "--input", ALG / "q.json")
    assert code == 2 and "field" in err


# -- corpus -------------------------------------------------------------------

def test_bundled_corpus_passes(capsys):
    code, rep, _ = run(capsys, "corpus", DATA / "corpus")
    assert code == 0 and rep["failed"] == []
    assert rep["total"] == rep["passed"] == len(list((DATA / "corpus").glob("*.json")))
    names = [e["fixture"] for e in rep["fixtures"]]
    assert names == sorted(names)


def test_empty_corpus(tmp_path, capsys):
    code, rep, _ = run(capsys, "corpus", tmp_path)
    assert code == 0 and rep["fixtures"] == [] and rep["total"] == 0


def test_corpus_names_broken_fixture(tmp_path, capsys):
    for name in ("algebra-m2.json", "category-z2.json", "statesum-torus-m2.json"):
        shutil.copy(DATA / "corpus" / name, tmp_path / name)
    data = json.loads((tmp_path / "category-z2.json").read_text())
    data["composition"] = [row if row[:2] != ["s", "s"] else ["s", "s", "missing"]
                           for row in data["composition"]]
    (tmp_path / "category-z2.json").write_text(json.dumps(data))
    code, rep, _ = run(capsys, "corpus", tmp_path)
    assert code == 1 and rep["failed"] == ["category-z2.json"]
    assert rep["passed"] == 2


def test_corpus_reports_unreadable_fixture(tmp_path, capsys):
    (tmp_path / "junk.json").write_text("[1, 2")
    code, rep, _ = run(capsys, "corpus", tmp_path)
    assert code == 1 and rep["failed"] == ["junk.json"]


def test_corpus_wrong_expectation(tmp_path, capsys):
    data = json.loads((DATA / "corpus" / "algebra-m2u.json").read_text())
    data["expect"]["symmetric"] = True
    (tmp_path / "algebra-m2u.json").write_text(json.dumps(data))
    code, rep, _ = run(capsys, "corpus", tmp_path)
    assert code == 1 and "expected symmetric=True" in rep["fixtures"][0]["failures"]


def test_output_is_byte_stable(capsys):
    argv = ["cat", "psi-check", "--input", str(CAT / "s3.json")]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "orbicat.cli", "frob", "check", "--input",
                           str(ALG / "q.json")], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "valid"
