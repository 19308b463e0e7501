from fractions import Fraction

import pytest

from helpers import data_path
from semiring_ci import (BOOLEAN, INF, LUKASIEWICZ, MOD2, NATURALS, PAIRNZ2, TROPICAL, KRelation,
                         Outcome, equivalent, format_tsv, parse_tsv, read_tsv)
from semiring_ci.errors import (CarrierError, DegenerateScaleError, EmptySupportError,
                                ParseError, SchemaError)
from semiring_ci.relation import as_schema


def rel(K, schema, rows):
    return KRelation(schema, K, rows)


def test_as_schema_forms():
    assert as_schema("A,B") == ("A", "B")
    assert as_schema(["B", "A"]) == ("B", "A")
    assert as_schema("") == ()
    with pytest.raises(SchemaError):
        as_schema(["A", "A"])


def test_zero_annotations_are_dropped():
    R = rel(NATURALS, ("A",), {("0",): 0, ("1",): 2})
    assert len(R) == 1 and R[("0",)] == 0


def test_empty_relation_rejected():
    with pytest.raises(EmptySupportError):
        rel(NATURALS, ("A",), {("0",): 0})


def test_lookup_by_mapping_and_tuple():
    R = rel(NATURALS, ("A", "B"), {("0", "1"): 3})
    assert R[{"B": "1", "A": "0"}] == 3
    assert R[("0", "1")] == 3
    assert R[("1", "1")] == 0
    with pytest.raises(SchemaError):
        R[("0",)]


def test_duplicate_tuples_rejected():
    with pytest.raises(SchemaError):
        rel(NATURALS, ("A",), [(("0",), 1), (("0",), 2)])


def test_marginals():
    R = read_tsv(data_path("hotel.tsv"))
    m = R.marginal(["Room", "Date"])
    assert dict(m.items()) == {("double", "2023-12-01"): 100, ("double", "2023-08-20"): 120,
                               ("twin", "2023-08-20"): 110}
    assert R.marginal([])[()] == 100
    assert R.value({"Room": "twin"}) == 110


def test_marginal_that_cancels_is_empty():
    R = rel(MOD2, ("A", "B"), {("0", "0"): 1, ("0", "1"): 1})
    cols, m = R.marginal_map(["A"])
    assert m == {}
    with pytest.raises(EmptySupportError):
        R.marginal(["A"])


def test_scale():
    R = rel(NATURALS, ("A",), {("0",): 2})
    assert R.scale(3)[("0",)] == 6
    with pytest.raises(DegenerateScaleError):
        R.scale(0)
    L = rel(LUKASIEWICZ, ("A",), {("0",): Fraction(1, 2)})
    with pytest.raises(EmptySupportError):
        L.scale(Fraction(1, 4))


def test_equality_ignores_column_order():
    R = rel(NATURALS, ("A", "B"), {("0", "1"): 3})
    S = rel(NATURALS, ("B", "A"), {("1", "0"): 3})
    assert R == S and hash(R) == hash(S)
    assert R != rel(TROPICAL, ("A", "B"), {("0", "1"): 3})


def test_active_domain_and_rename():
    R = rel(NATURALS, ("A", "B"), {("0", "1"): 1, ("2", "1"): 1})
    assert R.active_domain("A") == {"0", "2"}
    assert R.rename({"A": "X"}).schema == ("X", "B")


def test_equivalent_identity():
    R = rel(NATURALS, ("A",), {("0",): 2})
    eq = equivalent(R, R)
    assert (eq.outcome, eq.a, eq.b) == (Outcome.YES, 1, 1)


def test_equivalent_scaling():
    R = rel(NATURALS, ("A",), {("0",): 2, ("1",): 4})
    S = rel(NATURALS, ("A",), {("0",): 3, ("1",): 6})
    eq = equivalent(R, S)
    assert eq.outcome is Outcome.YES
    assert NATURALS.mul(eq.a, 2) == NATURALS.mul(eq.b, 3)


def test_not_equivalent_ratio():
    R = rel(NATURALS, ("A",), {("0",): 1, ("1",): 2})
    S = rel(NATURALS, ("A",), {("0",): 1, ("1",): 3})
    assert equivalent(R, S).outcome is Outcome.NO


def test_not_equivalent_support():
    R = rel(PAIRNZ2, ("A",), {("0",): (1, 0)})
    S = rel(PAIRNZ2, ("A",), {("0",): (1, 0), ("1",): (1, 0)})
    assert equivalent(R, S).outcome is Outcome.NO


def test_equivalent_schema_mismatch():
    with pytest.raises(SchemaError):
        equivalent(rel(NATURALS, ("A",), {("0",): 1}), rel(NATURALS, ("B",), {("0",): 1}))
    with pytest.raises(CarrierError):
        equivalent(rel(NATURALS, ("A",), {("0",): 1}), rel(BOOLEAN, ("A",), {("0",): True}))


def test_tsv_roundtrip_all_fixtures():
    for name in ("hotel.tsv", "hotel_table.tsv", "parity_pairs.tsv"):
        R = read_tsv(data_path(name))
        assert parse_tsv(format_tsv(R)) == R


def test_tsv_tropical_infinity_dropped():
    R = parse_tsv("#semiring: tropical\nA\t@\n0\t3\n1\tinf\n")
    assert len(R) == 1 and R[("1",)] is INF


def test_tsv_header_mismatch():
    with pytest.raises(ParseError):
        parse_tsv("#semiring: nat\nA\t@\n0\t3\n", "tropical")
    assert parse_tsv("A\t@\n0\t3\n", "nat")[("0",)] == 3
    with pytest.raises(ParseError):
        parse_tsv("A\t@\n0\t3\n")


def test_tsv_malformed():
    with pytest.raises(ParseError):
        parse_tsv("#semiring: nat\nA\tB\n0\t3\n")
    with pytest.raises(ParseError):
        parse_tsv("#semiring: nat\nA\t@\n0\t3\t4\n")
    with pytest.raises(ParseError):
        parse_tsv("#semiring: nat\nA\t@\n0\t-3\n")
