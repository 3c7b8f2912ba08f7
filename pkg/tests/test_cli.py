import json

import pytest

from siegelgk import cli
from siegelgk.corpus import generate_corpus
from siegelgk.forms import HalfIntMatrix
from siegelgk.gk import gk_invariant


def test_gk_command():
    status, out = cli.run(["gk", '{"p":2,"twiceB":[[2,0],[0,2]]}'])
    assert status == 0
    assert json.loads(out) == {"gk": [0, 1]}


def test_siegel_command():
    status, out = cli.run(["siegel", '{"p":2,"twiceB":[[4]]}'])
    terms = json.loads(out)["siegel"]["terms"]
    assert status == 0
    assert [(t["x_exp"], t["coeff"]["q0"]) for t in terms] == [(-1, "1"), (1, "1")]


def test_search_modes():
    status, out = cli.run(["gk", "--mode", "exhaustive", '{"p":2,"twiceB":[[2,1],[1,4]]}'])
    rec = json.loads(out)
    assert status == 0 and rec["gk"] == [0, 0] and rec["certified"]


@pytest.mark.parametrize("text, where", [
    ('{"p":2,"twiceB":[[2,0],[0', "<inline>:1:"),
    ('[{"p":2,"twiceB":[[3]]}]', "$[0]"),
    ('{"twiceB":[[2]]}', "missing key 'p'"),
    ('{"p":4,"twiceB":[[2]]}', "not a prime"),
    ('{"p":2,"twiceB":[[0]]}', "singular"),
])
def test_malformed_input(text, where, capsys):
    status, _ = cli.run(["gk", text])
    assert status == 2
    assert where in capsys.readouterr().err


def test_missing_file(tmp_path, capsys):
    status, _ = cli.run(["gk", "--input", str(tmp_path / "nope.json")])
    assert status == 2


def test_csv_and_lists(tmp_path):
    path = tmp_path / "forms.json"
    path.write_text(json.dumps([{"p": 2, "twiceB": [[2, 0], [0, 2]]}, {"p": 3, "twiceB": [[2, 0], [0, 6]]}]))
    status, out = cli.run(["egk", "--input", str(path), "--format", "csv"])
    lines = out.strip().splitlines()
    assert status == 0 and lines[0] == "egk.n,egk.m,egk.zeta" and len(lines) == 3


def test_decomposition_round_trip():
    for B in generate_corpus()[::97]:
        _, out = cli.run(["decompose", json.dumps(B.to_json())])
        rec = json.loads(out)
        again = cli.load_forms(json.dumps({"p": rec["p"], "blocks": rec["blocks"]}))[0]
        _, out2 = cli.run(["decompose", json.dumps(again.to_json())])
        assert json.loads(out2)["blocks"] == rec["blocks"]
        assert gk_invariant(again) == gk_invariant(B)


def test_deterministic_output():
    args = ["naive-egk", '[{"p":2,"twiceB":[[2,1,0],[1,2,0],[0,0,8]]},{"p":5,"twiceB":[[4,0],[0,10]]}]']
    assert cli.run(args) == cli.run(args)
    assert cli.run(["corpus", "--format", "csv"]) == cli.run(["corpus", "--format", "csv"])


def test_corpus_command():
    status, out = cli.run(["corpus"])
    forms = [HalfIntMatrix.from_json(x) for x in json.loads(out)]
    assert status == 0 and forms == list(generate_corpus())


def test_verify_small(tmp_path):
    report = tmp_path / "r.json"
    status, out = cli.run(["verify", "--p", "3", "--max-n", "2", "--max-ord", "1", "--exhaustive",
                           "--k", "1", "--report", str(report)])
    assert status == 0
    data = json.loads(report.read_text())
    assert data["mismatches"] == 0 and all("density" in r for r in data["records"])


def test_verify_reports_mismatch(tmp_path, monkeypatch, capsys):
    monkeypatch.setattr(cli, "gk_invariant", lambda B: (9,) * B.n)
    report = tmp_path / "r.json"
    status, _ = cli.run(["verify", '{"p":2,"twiceB":[[2]]}', "--exhaustive", "--report", str(report)])
    assert status == 1
    assert str(report) in capsys.readouterr().err


def test_verify_exhaustive_corpus(tmp_path):
    status, out = cli.run(["verify", "--p", "2", "--max-n", "2", "--max-ord", "3", "--exhaustive",
                           "--report", str(tmp_path / "r.json")])
    assert status == 0
    assert json.loads(out)["mismatches"] == 0
