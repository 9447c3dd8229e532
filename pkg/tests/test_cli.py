import json
from pathlib import Path

import pytest

from catsem import bicat as bc
from catsem import finset as fs
from catsem.cli import run

DATA = Path(__file__).resolve().parent.parent / "data"


def invoke(*argv):
    lines = []
    code = run([str(a) for a in argv], out=lines.append)
    return code, "\n".join(lines)


def invoke_json(*argv):
    code, text = invoke("--json", *argv)
    return code, json.loads(text)


@pytest.mark.parametrize("argv,code", [
    (("check", "category", DATA / "bool.json"), 0),
    (("check", "category", DATA / "bad_category.json"), 1),
    (("check", "functor", DATA / "functor.json"), 0),
    (("check", "nattrans", DATA / "nattrans.json"), 0),
    (("check", "bifunctor", DATA / "bifunctor.json"), 0),
    (("find", "terminal", DATA / "bool.json"), 0),
    (("find", "product", DATA / "bool.json", "0", "1"), 0),
    (("find", "coproduct", DATA / "bool.json", "0", "1"), 0),
    (("find", "exponential", DATA / "bool.json", "1", "0"), 0),
    (("find", "negation", DATA / "bool.json", "0", "--dualizing", "0"), 0),
    (("find", "product", DATA / "bool.json", "0"), 2),
    (("find", "product", DATA / "bool.json", "0", "7"), 2),
    (("check", "bicat", "triangle", "--instance", DATA / "monfinset.json"), 0),
    (("check", "bicat", "unitors", "--instance", DATA / "fincat.json", "--exhaustive"), 0),
    (("check", "bicat", "pentagon", "--instance", DATA / "monfinset_faulty.json"), 1),
    (("coherence", "paths", DATA / "pentagon.sexp", "--steps", "1"), 1),
    (("pseudolimit", DATA / "diagram.json"), 0),
    (("check", "category", DATA / "missing.json"), 2),
    (("check", "category", DATA / "pentagon.sexp"), 2),
    (("frobnicate",), 2),
    (("find", "product", DATA / "bool.json", "0", "1", "--budget-objects", "1"), 3),
    (("--budget-morphisms", "2", "find", "terminal", DATA / "bool.json"), 3),
])
def test_exit_codes(argv, code):
    assert invoke(*argv)[0] == code


def test_bicat_pentagon_exhaustive():
    code, rep = invoke_json("check", "bicat", "pentagon", "--instance", DATA / "monfinset.json", "--exhaustive")
    assert code == 0 and rep["status"] == "pass"
    assert rep["details"]["cases"] == 3 ** 4


def test_identity_scope_is_reported():
    _, rep = invoke_json("check", "bicat", "naturality", "--instance", DATA / "monfinset.json")
    assert rep["details"]["scope"] == "identity_cells"
    _, full = invoke_json("check", "bicat", "naturality", "--instance", DATA / "monfinset.json", "--exhaustive")
    assert full["details"]["scope"] == "all" and full["details"]["checks"] > rep["details"]["checks"]


def test_logic_check_prints_table():
    code, text = invoke("logic", "check", DATA / "id.proof", "--valuation", DATA / "valuation.json")
    assert code == 0 and "fn[0↦0,1↦1]" in text
    code, rep = invoke_json("logic", "check", DATA / "case_study.proof", "--valuation", DATA / "valuation.json")
    assert code == 0
    by_name = {t["name"]: t for t in rep["details"]["theorems"]}
    assert by_name["swap"]["table"] == ["fn[(0,a)↦(a,0),(1,a)↦(a,1)]"]
    assert by_name["exfalso"]["table"] == ["fn[]"]
    assert by_name["const"]["lambda_nodes"] == 2


def test_logic_check_rejects_bad_proof(tmp_path):
    f = tmp_path / "bad.proof"
    f.write_text("theorem t : p -> q\nproof \\x. x\n")
    code, rep = invoke_json("logic", "check", f, "--valuation", DATA / "valuation.json")
    assert code == 2 and rep["witnesses"][0]["error"] == "TypeMismatch"


def test_find_reports_certificates():
    _, rep = invoke_json("find", "exponential", DATA / "bool.json", "1", "0")
    (w,) = rep["details"]["found"]
    assert w["carrier"] == "0"
    # empty hom-sets give no tests; every other count is exactly one
    assert all(set(c["mediator_counts"]) <= {1} for c in w["certificate"].values())
    assert any(c["tests"] for c in w["certificate"].values())


def test_coherence_paths_against_instance():
    code, rep = invoke_json("coherence", "paths", DATA / "pentagon.sexp", "--instance", DATA / "monfinset.json",
                            "--steps", "4")
    assert code == 0 and rep["details"]["paths"] == len(rep["details"]["listing"]) == 36
    code, rep = invoke_json("coherence", "paths", DATA / "pentagon.sexp", "--instance",
                            DATA / "monfinset_faulty.json", "--steps", "3")
    assert code == 1 and rep["witnesses"]


def test_strictify_writes_outputs(tmp_path):
    code, rep = invoke_json("strictify", "--instance", DATA / "strictify_ab.json", "--generators", "A,B,(A×B)",
                            "--bound", "3", "--out", tmp_path)
    assert code == 0
    strings = json.loads((tmp_path / "strings.json").read_text())
    assert len(strings) == rep["details"]["strings"] == 1 + 3 + 9 + 27
    assert json.loads((tmp_path / "witness.json").read_text())["metadata"] == {"fold": "left"}
    assert json.loads((tmp_path / "report.json").read_text())["status"] == "pass"
    code, _ = invoke("strictify", "--instance", DATA / "strictify_ab.json", "--generators", "Q")
    assert code == 2


@pytest.mark.parametrize("argv", [
    ("check", "bicat", "interchange", "--instance", DATA / "fincat.json", "--exhaustive"),
    ("check", "bicat", "pentagon", "--instance", DATA / "monfinset_faulty.json", "--exhaustive"),
    ("strictify", "--instance", DATA / "strictify_ab.json", "--generators", "A,B", "--bound", "3"),
    ("coherence", "paths", DATA / "pentagon.sexp", "--instance", DATA / "monfinset.json"),
    ("logic", "check", DATA / "case_study.proof", "--valuation", DATA / "valuation.json"),
    ("find", "negation", DATA / "bool.json", "1", "--dualizing", "0"),
    ("pseudolimit", DATA / "diagram.json", "--emit-table"),
])
def test_json_is_byte_stable(argv):
    assert invoke("--json", *argv) == invoke("--json", *argv)


def test_parallel_matches_serial():
    argv = ("check", "bicat", "pentagon", "--instance", DATA / "monfinset_faulty.json", "--exhaustive")
    _, serial = invoke_json(*argv)
    _, par = invoke_json("--parallel", "3", *argv)
    assert serial["witnesses"] == par["witnesses"] and serial["details"] == par["details"]


def test_timing_only_on_request():
    _, rep = invoke_json("check", "category", DATA / "bool.json")
    assert "timing" not in rep
    _, rep = invoke_json("--timing", "check", "category", DATA / "bool.json")
    assert rep["timing"]["seconds"] >= 0


def test_flags_accepted_after_subcommand():
    code, rep = invoke_json("check", "category", DATA / "bool.json", "--budget-objects", "9")
    assert code == 0 and rep["budget"]["objects"] == 9


def test_fail_witness_replays():
    _, rep = invoke_json("check", "bicat", "pentagon", "--instance", DATA / "monfinset_faulty.json", "--exhaustive")
    inst = bc.instance_from_json(json.loads((DATA / "monfinset_faulty.json").read_text()))
    by_label = {inst.one_cell_label(f): f for f in inst.all_one_cells()}
    for w in rep["witnesses"]:
        replay = bc.check_pentagon(inst, *(by_label[x] for x in w["one_cells"]))
        assert not replay.passed
        assert replay.witnesses[0]["lhs"] == w["lhs"]


def test_category_witness_replays():
    from catsem import fincat as fc
    _, rep = invoke_json("check", "category", DATA / "bad_category.json")
    w = rep["witnesses"][0]
    c = fc.category_from_json(json.loads((DATA / "bad_category.json").read_text()))
    assert c.compose(w["g"], w["f"]) == w["composite"]
    assert [c.dom(w["composite"]), c.cod(w["composite"])] != w["expected"]


def test_sample_sets_are_registered():
    data = json.loads((DATA / "strictify_ab.json").read_text())
    labels = [fs.set_from_json(s).label for s in data["sets"]]
    assert labels == ["A", "B", "(A×B)"]
