import pytest

from helpers import data_path
from semiring_ci import (BOOLEAN, CI, FD, NATURALS, PAIRNZ2, TROPICAL, KRelation, Outcome,
                         c_excl, c_star, is_lossless, join, multiplicative_join, normalize_4nf,
                         read_tsv, reconstruct)
from semiring_ci.dependency import MVD, load_dependencies
from semiring_ci.errors import CarrierError, SchemaError


@pytest.fixture(scope="module")
def hotel():
    return read_tsv(data_path("hotel.tsv"))


@pytest.fixture(scope="module")
def pairs():
    return read_tsv(data_path("parity_pairs.tsv"))


def test_c_star(hotel):
    assert c_star(hotel, {"Room"}) == 210
    single = KRelation(("A",), NATURALS, {("0",): 7})
    assert c_star(single, {"A"}) == 7


def test_c_excl(hotel, pairs):
    rp = hotel.marginal(["Room", "Persons"])
    assert c_excl(rp, {"Room"}, {"Room": "double"}) == 110
    assert c_excl(rp, {"Room"}, ("twin",)) == 100
    # u outside the marginal support: the full product
    assert c_excl(rp, {"Room"}, ("suite",)) == 210
    single = KRelation(("A",), NATURALS, {("0",): 7})
    assert c_excl(single, {"A"}, ("0",)) == 1
    assert c_excl(pairs.marginal(["B"]), (), ()) == (1, 1)
    with pytest.raises(SchemaError):
        c_excl(rp, {"Room"}, {"Persons": "1"})


def test_multiplicative_join(hotel):
    M = multiplicative_join(hotel.marginal(["Room", "Date"]), hotel.marginal(["Room", "Persons"]))
    assert M[{"Room": "double", "Date": "2023-12-01", "Persons": "1"}] == 200
    assert M[{"Room": "twin", "Date": "2023-08-20", "Persons": "2"}] == 230


def test_boolean_multiplicative_join_is_natural_join():
    R = KRelation(("A", "B"), BOOLEAN, {("0", "x"): True, ("1", "y"): True})
    S = KRelation(("B", "C"), BOOLEAN, {("x", "p"): True, ("x", "q"): True, ("z", "r"): True})
    J = multiplicative_join(R, S)
    assert J.support() == {("0", "x", "p"), ("0", "x", "q")}
    assert join(R, S).support() == J.support()


def test_join_values(hotel, pairs):
    J = join(hotel.marginal(["Room", "Date"]), hotel.marginal(["Room", "Persons"]))
    assert J[{"Room": "double", "Date": "2023-12-01", "Persons": "1"}] == 310
    assert J == hotel.scale(210)
    F = join(pairs.marginal(["A"]), pairs.marginal(["B"]))
    assert sorted(F.values()) == [(4, 1)] * 4


def test_join_semiring_mismatch(hotel):
    other = KRelation(("Room",), NATURALS, {("double",): 1})
    with pytest.raises(CarrierError):
        join(hotel, other)


def test_self_join_unrolls(hotel):
    J = join(hotel, hotel)
    for t, v in hotel.items():
        assert J[t] == TROPICAL.prod([v, v, c_excl(hotel, hotel.schema, t)])


def test_is_lossless_examples(hotel, pairs):
    res = is_lossless(hotel, ["Room", "Date"], ["Room", "Persons"])
    assert res.outcome is Outcome.YES and res.joined == hotel.scale(210)
    f = is_lossless(pairs, ["A"], ["B"])
    assert f.outcome is Outcome.YES and (f.a, f.b) == ((1, 0), (4, 0))
    with pytest.raises(SchemaError):
        is_lossless(hotel, ["Room"], ["Date"])


def test_lossless_failure_naturals():
    R = KRelation(("A", "B"), NATURALS, {("0", "0"): 1, ("1", "1"): 1})
    assert is_lossless(R, ["A"], ["B"]).outcome is Outcome.NO


def test_bn_plan():
    plan = normalize_4nf(tuple("ABCDE"), load_dependencies(data_path("bn.jsonl")))
    assert plan.schemas == [("A", "B"), ("A", "C"), ("B", "C", "D"), ("D", "E")]
    assert [s.mvd for s in plan.steps] == [CI({"D"}, {"E"}, {"A", "B", "C"}),
                                           CI({"B", "C"}, {"A"}, {"D"}),
                                           CI({"A"}, {"B"}, {"C"})]
    js = plan.to_json()
    assert js["schemas"][0] == ["A", "B"] and js["steps"][0]["split"][0] == ["D", "E"]


def test_plan_trivial_and_fd():
    assert normalize_4nf(tuple("ABC"), []).schemas == [("A", "B", "C")]
    assert normalize_4nf(tuple("ABC"), [FD({"A"}, {"B"})]).schemas == [("A", "B"), ("A", "C")]


def test_plan_superkey_not_split():
    # A is a key, so A ->> B is no 4NF violation
    plan = normalize_4nf(tuple("ABC"), [FD({"A"}, {"B", "C"})])
    assert plan.schemas == [("A", "B", "C")]


def test_plan_accepts_mvd():
    plan = normalize_4nf(tuple("ABC"), [MVD({"A"}, {"B"})])
    assert plan.schemas == [("A", "B"), ("A", "C")]


def test_plan_rejects_other_kinds():
    from semiring_ci import EMVD
    with pytest.raises(SchemaError):
        normalize_4nf(tuple("ABC"), [EMVD({"A"}, {"B"}, {"C"})])


def test_reconstruct(hotel):
    plan = normalize_4nf(hotel.schema, [CI({"Room"}, {"Date"}, {"Persons"})])
    J = reconstruct(hotel, plan)
    assert J == hotel.scale(210)


def test_reconstruct_pairnz2_three_way():
    R = KRelation(("A", "B", "C"), PAIRNZ2, {("0", "0", "0"): (1, 0), ("0", "1", "1"): (1, 1)})
    plan = normalize_4nf(R.schema, [CI({"A"}, {"B"}, {"C"})])
    assert plan.schemas == [("A", "B"), ("A", "C")]
    J = reconstruct(R, plan)
    assert J.support() >= R.support()
