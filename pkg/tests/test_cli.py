import io
import json

import pytest

from semiring_ci.cli import main

CI_HOTEL = '{"ci":{"x":["Room"],"y":["Date"],"z":["Persons"]}}'
CI_AB = '{"ci":{"x":[],"y":["A"],"z":["B"]}}'


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def lines(text):
    return [json.loads(line) for line in text.splitlines() if line]


def test_check_hotel_bytes():
    code, out, _ = run("check", "--rel", "hotel.tsv", "--dep", CI_HOTEL)
    assert code == 0
    assert out == ('{"dependency":{"ci":{"x":["Room"],"y":["Date"],"z":["Persons"]}},'
                   '"holds":true}\n')


def test_check_pairs_witness():
    code, out, _ = run("check", "--rel", "parity_pairs.tsv", "--dep", CI_AB)
    assert code == 1
    (rec,) = lines(out)
    assert rec["witness"] == {"lhs": "(4,1)", "rhs": "(4,0)", "tuple": {"A": "0", "B": "0"}}


def test_check_several_dependencies():
    code, out, _ = run("check", "--rel", "parity_pairs.tsv", "--dep", CI_AB,
                       "--dep", '{"mid":{"x":["A"],"y":["B"]}}')
    assert code == 1
    assert [r["holds"] for r in lines(out)] == [False, True]


def test_check_semiring_mismatch():
    code, out, err = run("check", "--rel", "hotel.tsv", "--semiring", "nat", "--dep", CI_HOTEL)
    assert code == 3 and out == ""
    assert json.loads(err)["kind"]


def test_pretty_is_same_data():
    _, compact, _ = run("check", "--rel", "hotel.tsv", "--dep", CI_HOTEL)
    _, pretty, _ = run("check", "--pretty", "--rel", "hotel.tsv", "--dep", CI_HOTEL)
    assert pretty != compact and json.loads(pretty) == json.loads(compact)


def test_normalize_bn():
    code, out, _ = run("normalize", "--schema", "A,B,C,D,E", "--sigma", "bn.jsonl")
    assert code == 0
    assert json.loads(out)["schemas"] == [["A", "B"], ["A", "C"], ["B", "C", "D"], ["D", "E"]]


def test_decompose_pairs():
    code, out, _ = run("decompose", "--rel", "parity_pairs.tsv", "--left", "A", "--right", "B")
    assert code == 0
    assert out == '{"a":"(1,0)","b":"(4,0)","left":["A"],"lossless":"Lossless","right":["B"]}\n'


def test_decompose_with_plan():
    code, out, _ = run("decompose", "--rel", "hotel.tsv", "--sigma", CI_HOTEL)
    assert code == 0
    rec = json.loads(out)
    assert rec["schemas"] == [["Date", "Room"], ["Persons", "Room"]]
    assert rec["rejoined"] == "Lossless"


def test_chase_cycle_deterministic():
    a = run("chase", "--sigma", "cycle_sigma.jsonl", "--tau", "cycle_tau.json")
    b = run("chase", "--sigma", "cycle_sigma.jsonl", "--tau", "cycle_tau.json")
    assert a == b and a[0] == 0
    rec = json.loads(a[1])
    assert rec["verdict"] == "Implied" and rec["steps"] == 3


def test_chase_budget_unknown():
    code, out, _ = run("chase", "--sigma", "cycle_sigma.jsonl", "--tau", "cycle_tau.json",
                       "--max-steps", "1")
    assert code == 2 and json.loads(out)["verdict"] == "Unknown"


def test_implies_counterexample():
    code, out, _ = run("implies", "--schema", "A,B,C", "--sigma", '{"fd":{"x":["A"],"y":["B"]}}',
                       "--tau", CI_AB)
    assert code == 1
    rec = json.loads(out)
    assert rec["implied"] is False and rec["counterexample"]["agree"] == []


def test_implies_with_proof():
    code, out, _ = run("implies", "--schema", "A,B,C", "--sigma", '{"fd":{"x":["A"],"y":["B"]}}',
                       "--tau", '{"ci":{"x":["A"],"y":["B"],"z":["C"]}}')
    assert code == 0
    rec = json.loads(out)
    assert rec["implied"] is True and rec["proof"][-1]["rule"] == "FDCI1"


def test_implies_unsaturated_is_usage_error():
    code, _, err = run("implies", "--schema", "A,B,C,D,E", "--sigma", "bn.jsonl", "--tau", CI_AB)
    assert code == 3 and json.loads(err)["kind"] == "PreconditionError"


def test_verify_zy():
    code, out, _ = run("verify-proof", "zhang_yeung.proof.json")
    assert code == 0
    assert out == '{"mode":"entropic","name":"zhang-yeung","steps":20,"valid":true}\n'


@pytest.mark.parametrize("name,step", [("zy_changed_coefficient", 9), ("zy_missing_instance", 6),
                                       ("final_mentions_copy", 3), ("triviality_nonempty_z", 1)])
def test_verify_negative(name, step):
    code, out, _ = run("verify-proof", f"negative/{name}.proof.json")
    rec = json.loads(out)
    assert code == 1 and rec["valid"] is False and rec["step"] == step


def test_verify_mode_mismatch():
    code, out, _ = run("verify-proof", "zhang_yeung.proof.json", "--mode", "dependency")
    assert code == 1 and json.loads(out)["valid"] is False


def test_copy_extend_and_roundtrip(tmp_path):
    dest = tmp_path / "copy.tsv"
    code, out, _ = run("copy-extend", "--rel", "hotel.tsv", "--x", "Room", "--y", "Date,Persons",
                       "--out", str(dest))
    rec = json.loads(out)
    assert code == 0 and rec["scale"] == "210" and all(rec["checks"].values())
    assert rec["schema"] == ["Room", "Date", "Persons", "Date'", "Persons'"]
    code, out, _ = run("check", "--rel", str(dest),
                       "--dep", '{"mid":{"x":["Room","Date"],"y":["Room","Date\'"]}}')
    assert code == 0


def test_entropy(tmp_path):
    p = tmp_path / "q.tsv"
    p.write_text("#semiring: qnn\nA\tB\t@\n0\t0\t1/2\n1\t1\t1/2\n")
    code, out, _ = run("entropy", "--rel", str(p), "--subset", "A,B")
    assert code == 0 and json.loads(out)["entropy"] == 1.0
    code, out, _ = run("entropy", "--rel", str(p), "--vector")
    assert code == 0 and json.loads(out) == {"": 0.0, "A": 1.0, "B": 1.0, "A,B": 1.0}
    code, _, err = run("entropy", "--rel", "parity_pairs.tsv", "--subset", "A")
    assert code == 3 and json.loads(err)["kind"] == "CapabilityError"


def test_laws():
    code, out, _ = run("laws", "--semiring", "pairnz2")
    (rec,) = lines(out)
    assert code == 0 and rec["ok"] and rec["flags"]["mult_cancellative"] is False
    code, out, _ = run("laws")
    assert code == 0 and len(lines(out)) == 8


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["check", "--rel", "hotel.tsv"],
                                  ["check", "--rel", "nope.tsv", "--dep", CI_HOTEL],
                                  ["check", "--rel", "hotel.tsv", "--dep", "{"],
                                  ["laws", "--semiring", "boolean"]])
def test_usage_errors(argv):
    code, out, err = run(*argv)
    assert code == 3 and out == ""
    assert set(json.loads(err.splitlines()[-1])) == {"error", "kind"}
