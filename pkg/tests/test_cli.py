import json

import pytest

from qpmutation.cli import main, parse_seeds

THREE_CYCLE = {
    "quiver": {"vertices": ["1", "2", "3"],
               "arrows": [{"id": "a", "tail": "1", "head": "2"}, {"id": "b", "tail": "2", "head": "3"},
                          {"id": "c", "tail": "3", "head": "1"}]},
    "potential": {"terms": [{"coeff": "1", "cycle": ["c", "b", "a"]}]},
}
RUNNING = {"dims": {"1": 1, "2": 1, "3": 1}, "action": {"a": [[1]], "b": [[0]], "c": [[0]]}}


@pytest.fixture
def doc(tmp_path):
    def write(obj, name="in.json"):
        p = tmp_path / name
        p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
        return str(p)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_seeds():
    assert parse_seeds("1..4") == [1, 2, 3, 4]
    assert parse_seeds("1,5, 7..8") == [1, 5, 7, 8]
    with pytest.raises(ValueError):
        parse_seeds(" , ")


def test_mutate_quiver(capsys, doc):
    code, out, _ = run(capsys, "mutate-quiver", "--vertex", "2", doc(THREE_CYCLE))
    assert code == 0
    arrows = {(a["id"], a["tail"], a["head"]) for a in json.loads(out)["arrows"]}
    assert arrows == {("a*", "2", "1"), ("b*", "3", "2")}


def test_mutate_qp(capsys, doc):
    code, out, _ = run(capsys, "mutate-qp", "--vertex", "2", doc(THREE_CYCLE))
    assert code == 0
    res = json.loads(out)
    arrows = {(a["id"], a["tail"], a["head"]) for a in res["quiver"]["arrows"]}
    assert arrows == {("a*", "2", "1"), ("b*", "3", "2")}
    assert res["potential"]["terms"] == []


def test_mutate_qp_with_split(capsys, doc):
    code, out, _ = run(capsys, "mutate-qp", "--vertex", "2", "--direction", "minus", "--with-split",
                       doc(THREE_CYCLE))
    assert code == 0
    phi = {e["arrow"]: e["image"] for e in json.loads(out)["split"]["phi"]}
    assert {"coeff": "1", "path": ["a*", "b*"]} in phi["c"]


def test_mutate_rep(capsys, doc):
    code, out, _ = run(capsys, "mutate-rep", "--vertex", "2", "--emit-choice",
                       doc({**THREE_CYCLE, "rep": RUNNING}))
    assert code == 0
    res = json.loads(out)
    assert res["rep"]["action"] == {"a*": [[0]], "b*": [[32002]]}
    assert set(res["choice"]) == {"ker_gamma_mod_im_beta", "im_gamma", "ker_alpha_mod_im_gamma"}


def test_rational_field_from_environment(capsys, doc, monkeypatch):
    monkeypatch.setenv("QPMUT_FIELD", "rational")
    code, out, _ = run(capsys, "mutate-rep", "--vertex", "2", doc({**THREE_CYCLE, "rep": RUNNING}))
    assert code == 0
    assert json.loads(out)["rep"]["action"]["b*"] == [["-1"]]


def test_global_flag_before_subcommand(capsys, doc):
    code, _, err = run(capsys, "--field", "fp:4", "check", doc({**THREE_CYCLE, "rep": RUNNING}))
    assert code == 2 and "not prime" in err


def test_check(capsys, doc):
    code, out, _ = run(capsys, "check", doc({**THREE_CYCLE, "rep": RUNNING}))
    assert code == 0 and json.loads(out) == {"valid": True}
    bad = {"dims": RUNNING["dims"], "action": {"a": [[1]], "b": [[1]], "c": [[0]]}}
    code, out, _ = run(capsys, "check", doc({**THREE_CYCLE, "rep": bad}))
    assert code == 1
    assert json.loads(out)["arrow"] == "c"


def test_hom(capsys, doc):
    code, out, _ = run(capsys, "hom", "--quotient-at", "2", doc({**THREE_CYCLE, "source": RUNNING}))
    assert code == 0
    res = json.loads(out)
    assert res["dim"] == 2 and res["quotient_dim"] == 2


@pytest.mark.parametrize("op", ["plus", "minus", "psi", "naturality"])
def test_functor(capsys, doc, op):
    code, out, _ = run(capsys, "functor", "--vertex", "2", "--op", op,
                       doc({**THREE_CYCLE, "source": RUNNING, "rep": RUNNING}))
    assert code == 0
    res = json.loads(out)
    if op == "naturality":
        assert res["confined"] is True
    if op == "psi":
        assert all(res["conditions"].values())


def test_malformed_json(capsys, doc):
    code, _, err = run(capsys, "mutate-qp", "--vertex", "2", doc('{"quiver": [1, 2,'))
    assert code == 2
    assert "line 1 column" in err


def test_unknown_vertex(capsys, doc):
    code, _, err = run(capsys, "mutate-qp", "--vertex", "9", doc(THREE_CYCLE))
    assert code == 2 and "UnknownVertex" in err


def test_missing_file(capsys):
    code, _, err = run(capsys, "mutate-qp", "--vertex", "2", "/nonexistent/x.json")
    assert code == 2


def test_bad_usage(capsys):
    assert main(["frobnicate"]) == 2


def test_verify(capsys, tmp_path):
    out_dir = tmp_path / "reports"
    code, out, err = run(capsys, "verify", "--seeds", "1..3", "--report-dir", str(out_dir))
    assert code == 0
    lines = [json.loads(x) for x in out.splitlines()]
    assert [r["seed"] for r in lines] == [1, 2, 3] and all(r["passed"] for r in lines)
    assert "3/3" in err
    names = {p.name for p in out_dir.iterdir()}
    assert {"reports.jsonl", "checks.png", "runtime.png"} <= names


def test_verify_bad_seeds(capsys):
    code, _, _ = run(capsys, "verify", "--seeds", "x..y")
    assert code == 2
