import json

import pytest

from tests.conftest import EX_BODY_DOMINATOR, EX_CHOICE_LOOPS
from wfprop.cli import main, split_assumptions
from wfprop.reachability import counterexample_instance, format_instance


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in [("loops.lp", EX_CHOICE_LOOPS), ("dom.lp", EX_BODY_DOMINATOR), ("odd.lp", "a :- not a.\n"),
                       ("bad.lp", "a :- b,, c.\n"), ("empty.lp", "")]:
        paths[name] = tmp_path / name
        paths[name].write_text(text)
    paths["ce.reach"] = tmp_path / "ce.reach"
    paths["ce.reach"].write_text(format_instance(counterexample_instance()))
    return {k: str(v) for k, v in paths.items()}


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_text(files, capsys):
    code, out, _ = run(capsys, "solve", files["loops.lp"])
    assert code == 0
    assert "Answer 1: a c d" in out and "Answer 2: b e f" in out and "SATISFIABLE" in out


def test_solve_json_schema(files, capsys):
    code, out, _ = run(capsys, "solve", files["loops.lp"], "--props=up,fl,dom", "--json")
    rec = json.loads(out)
    assert code == 0
    assert set(rec) == {"instance", "props", "answer_sets", "branches", "conflicts", "time_ms", "inferences",
                        "complete"}
    assert rec["answer_sets"] == [["a", "c", "d"], ["b", "e", "f"]]
    assert set(rec["inferences"]) == {"up", "fl", "dom", "blprobe"}


def test_solve_exit_codes(files, capsys):
    assert run(capsys, "solve", files["odd.lp"])[0] == 20
    code, _, err = run(capsys, "solve", files["bad.lp"])
    assert code == 1 and "1:8" in err
    assert run(capsys, "solve", files["loops.lp"], "--props", "up,dom")[0] == 1
    assert run(capsys, "solve", files["loops.lp"], "--enum", "1")[0] == 0


def test_usage_error_exits_one(capsys):
    with pytest.raises(SystemExit) as info:
        main(["solve"])
    assert info.value.code == 1


def test_propagate_listing(files, capsys):
    code, out, _ = run(capsys, "propagate", files["loops.lp"], "--assume", "t:c", "--props=up,fl,dom")
    assert code == 0 and "a=T (dom)" in out.splitlines()
    code, out, _ = run(capsys, "propagate", files["loops.lp"], "--assume", "t:c", "--props=up,fl")
    assert out.splitlines() == ["c=T (assume)", "{c}=T (up)", "d=T (up)", "{d}=T (up)"]
    code, out, _ = run(capsys, "propagate", files["empty.lp"])
    assert code == 0 and out == ""


def test_propagate_explain_and_conflict(files, capsys):
    code, out, _ = run(capsys, "propagate", files["dom.lp"], "--assume", "t:a", "--props=up,fl,dom", "--explain")
    assert "dominates true atom a" in out or code == 20
    code, out, _ = run(capsys, "propagate", files["dom.lp"], "--assume", "t:{b,c},f:{not c}")
    assert code == 20 and "CONFLICT (up)" in out
    assert run(capsys, "propagate", files["dom.lp"], "--assume", "t:zz")[0] == 1


def test_split_assumptions():
    assert split_assumptions("t:a, f:{b,not c},t:c") == ["t:a", "f:{b,not c}", "t:c"]


def test_check_dc(files, capsys):
    code, out, _ = run(capsys, "check-dc", files["ce.reach"], "--props=up,fl")
    assert code == 0 and "missed_pruning" in out and "NOT domain consistent" in out
    code, out, _ = run(capsys, "check-dc", files["ce.reach"], "--props=up,fl,dom", "--json")
    assert json.loads(out)["counts"]["missed_pruning"] == 0


def test_bench(files, capsys):
    code, out, _ = run(capsys, "bench", files["ce.reach"], files["loops.lp"], "--generate", "3")
    assert code == 0
    totals = [l.split() for l in out.splitlines() if l.startswith("TOTAL")]
    assert [t[1] for t in totals] == ["up,fl", "up,fl,dom"]
    assert int(totals[1][4]) <= int(totals[0][4])


def test_verify(capsys, monkeypatch):
    code, out, _ = run(capsys, "verify", "--count=0")
    assert code == 0 and "violations=0" in out
    monkeypatch.setenv("WFPROP_SEED", "5")
    code, out, _ = run(capsys, "verify", "--count=3", "--suite", "soundness", "--suite", "dc-open")
    assert code == 0 and out.count("cases=3") == 2
    monkeypatch.setenv("WFPROP_SEED", "x")
    assert run(capsys, "verify", "--count=1")[0] == 1


def test_dump_is_deterministic(files, capsys):
    _, one, _ = run(capsys, "dump", files["dom.lp"])
    _, two, _ = run(capsys, "dump", files["dom.lp"])
    assert one == two and one.startswith("digraph support {")
    assert 'label="TOP"' in one and one.count("->") == 8 + 7


def test_parse(files, capsys):
    code, out, _ = run(capsys, "parse", files["dom.lp"], "--json")
    d = json.loads(out)
    assert code == 0 and d["class"] == "component-unary" and d["sccs"] == [["a", "b"], ["c"]]
