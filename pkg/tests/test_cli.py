import json
import subprocess
import sys
from fractions import Fraction as F
from pathlib import Path

import pytest

from matchplay.cli import run
from matchplay.polytope import Digraph

DATA = Path(__file__).resolve().parent.parent / "data"


def call(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_t1_pstar_file(capsys):
    code, out, _ = call(capsys, "eval", "--tournament", "t1", "--N", "2", "--matrix", str(DATA / "pstar.json"))
    assert code == 0
    data = json.loads(out)
    assert [F(x) for x in data["win_vector"]] == [F(3, 8), F(5, 12), F(5, 24)]


def test_eval_inline_matrix_and_csv(capsys):
    m = json.dumps({"n": 2, "p": [["1/2", "2/7"], ["5/7", "1/2"]]})
    code, out, _ = call(capsys, "eval", "--tournament", "uniform", "--n", "2", "--matrix", m, "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["player,pi", "1,1/2", "2,1/2"]


def test_corners_csv(capsys):
    code, out, _ = call(capsys, "corners", "--n", "3", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and len(lines) == 6
    rows = {tuple(line.split(",")[1:]) for line in lines[1:]}
    assert ("1/3", "1/2", "1/6") in rows and ("2/3", "0/1", "1/3") in rows


def test_corners_json_count(capsys):
    code, out, _ = call(capsys, "corners", "--n", "5")
    assert code == 0 and json.loads(out)["count"] == 41


def test_digraphs(capsys):
    code, out, _ = call(capsys, "digraphs", "--n", "3")
    data = json.loads(out)
    assert code == 0 and data["count"] == 15
    assert Digraph.from_json(data["digraphs"][0]).n == 3


def test_member_true_with_witness(capsys):
    code, out, _ = call(capsys, "member", "--n", "3", "--x", "1/3,1/2,1/6")
    data = json.loads(out)
    assert code == 0 and data["member"] is True and data["methods_agree"]
    flow = [[F(x) for x in row] for row in data["arc_flow"]]
    assert [sum(r[j] for r in flow) / 3 for j in range(3)] == [F(1, 3), F(1, 2), F(1, 6)]


def test_member_false_with_certificate(capsys):
    code, out, _ = call(capsys, "member", "--x", "3/10,2/5,3/10")
    data = json.loads(out)
    assert code == 0 and data["member"] is False and "farkas" in data


def test_member_bad_input(capsys):
    assert call(capsys, "member", "--x", "1/2,1/4")[0] == 2
    assert call(capsys, "member", "--n", "2", "--x", "1/3,1/3,1/3")[0] == 2
    assert call(capsys, "member", "--x", "a,b")[0] == 2


def test_check_exit_codes(capsys):
    code, out, _ = call(capsys, "check", "--tournament", "t1", "--N", "2", "--matrix", "pstar",
                        "--property", "fairness")
    assert code == 1 and json.loads(out)["verdict"] == "fail"
    code, out, _ = call(capsys, "check", "--tournament", "t1", "--N", "2", "--seed", "3",
                        "--property", "symmetry")
    assert code == 0 and json.loads(out)["verdict"] == "pass-on-samples"
    code, out, _ = call(capsys, "check", "--tournament", "rounds-example", "--seed", "1",
                        "--property", "rounds-honesty")
    assert code == 0
    code, out, _ = call(capsys, "check", "--tournament", "rounds-example", "--seed", "1",
                        "--property", "honesty")
    assert code == 1


def test_check_requires_seed_without_matrix(capsys):
    code, _, err = call(capsys, "check", "--tournament", "t1", "--property", "symmetry")
    assert code == 2 and "--seed" in err


def test_simulate_requires_seed(capsys):
    assert call(capsys, "simulate", "--tournament", "t1", "--matrix", "pstar")[0] == 2


def test_simulate_reproducible(capsys, tmp_path):
    args = ["simulate", "--tournament", "t2", "--N", "4", "--matrix", "pstar", "--trials", "3000",
            "--seed", "9"]
    call(capsys, *args, "--output", str(tmp_path / "a.json"))
    call(capsys, *args, "--output", str(tmp_path / "b.json"))
    a = json.loads((tmp_path / "a.json").read_text())
    assert a == json.loads((tmp_path / "b.json").read_text())
    assert sum(a["counts"]) == 3000


def test_probe_map(capsys):
    code, out, _ = call(capsys, "probe-map", "--matrix", "pstar", "--objective", "0,1,0")
    assert code == 0 and F(json.loads(out)["value"]) == F(1, 2)
    code, out, _ = call(capsys, "probe-map", "--matrix", "pstar", "--objective", "1,0,0", "--minimize")
    assert F(json.loads(out)["value"]) == F(1, 3)
    assert call(capsys, "probe-map", "--matrix", "pstar", "--objective", "1,0")[0] == 2


def test_table1(capsys):
    code, out, _ = call(capsys, "table1", "--n", "3", "--format", "csv")
    lines = out.strip().splitlines()
    assert code == 0 and lines[0] == "sigma,arcs,vector" and len(lines) == 6
    assert '"(1,2,3) or (1,3,2)",1->1x2 2->1x2 3->1x2,1/1 0/1 0/1' in lines
    code, out, _ = call(capsys, "table1", "--n", "2")
    assert len(json.loads(out)["rows"]) == 2


def test_graph_tournament_from_cli(capsys, tmp_path):
    g = tmp_path / "g.json"
    g.write_text(json.dumps({"n": 4, "arcs": [[1, 1, 2], [2, 2, 2], [3, 3, 2], [4, 4, 2]]}))
    code, out, _ = call(capsys, "eval", "--tournament", "graph", "--digraph", str(g), "--N", "1",
                        "--matrix", json.dumps({"n": 4, "p": [
                            ["1/2", "2/3", "3/4", "23/24"], ["1/3", "1/2", "7/12", "11/12"],
                            ["1/4", "5/12", "1/2", "5/6"], ["1/24", "1/12", "1/6", "1/2"]]}))
    assert code == 0
    assert [F(x) for x in json.loads(out)["win_vector"]] == [F(1, 4)] * 4


def test_usage_errors(capsys):
    assert call(capsys)[0] == 2
    assert call(capsys, "nope")[0] == 2
    assert call(capsys, "eval", "--tournament", "t1")[0] == 2
    assert call(capsys, "eval", "--tournament", "t1", "--matrix", "missing.json")[0] == 2
    bad = json.dumps({"n": 2, "p": [["1/2", "2/3"], ["2/3", "1/2"]]})
    assert call(capsys, "eval", "--tournament", "uniform", "--n", "2", "--matrix", bad)[0] == 2


def test_state_limit_env(monkeypatch, capsys):
    monkeypatch.setenv("TOURNEY_MAX_STATES", "3")
    code, _, err = call(capsys, "eval", "--tournament", "rr-max", "--n", "3", "--N", "3", "--matrix", "pstar")
    assert code == 2 and err


@pytest.mark.parametrize("entry", [["-m", "matchplay"]])
def test_module_entry_point(entry):
    proc = subprocess.run([sys.executable, *entry, "corners", "--n", "2", "--format", "csv"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "sequence,x1,x2"
