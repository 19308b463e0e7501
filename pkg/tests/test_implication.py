import itertools

import pytest

from helpers import data_path
from semiring_ci import (CI, FD, MVD, NATURALS, NONNEG_RATIONALS, TROPICAL, DerivationStep,
                         check_derivation, derive_scifd, implies_scifd, satisfies)
from semiring_ci.dependency import star
from semiring_ci.errors import PreconditionError, SchemaError
from semiring_ci.implication import (RULES, RuleError, TwoTupleOracle, conclude,
                                     two_tuple_relation)
from semiring_ci.proofs import check_dependency_proof, load_proof

V3 = ("A", "B", "C")


def test_fd_implies_ci():
    assert implies_scifd(V3, [FD({"A"}, {"B"})], CI({"A"}, {"B"}, {"C"}))


def test_member_implied():
    d = CI({"A"}, {"B"}, {"C"})
    assert implies_scifd(V3, [d], d)


def test_decomposition_example():
    V = tuple("ABCD")
    assert implies_scifd(V, [CI({"A"}, {"B"}, {"C", "D"})], CI({"A"}, {"B"}, {"C"}))


def test_counterexample_is_agreement_set():
    res = implies_scifd(V3, [], CI({"A"}, {"B"}, {"C"}))
    assert not res.holds and res.counterexample == frozenset({"A"})
    R = two_tuple_relation(V3, res.counterexample)
    assert not satisfies(R, CI({"A"}, {"B"}, {"C"}))


def test_mvd_premises_are_converted():
    assert implies_scifd(V3, [MVD({"A"}, {"B"})], CI({"A"}, {"C"}, {"B"}))


def test_unsaturated_premise_rejected():
    with pytest.raises(PreconditionError):
        TwoTupleOracle(tuple("ABCD"), [CI({"A"}, {"B"}, {"C"})])


def test_premise_outside_schema():
    with pytest.raises(SchemaError):
        TwoTupleOracle(("A", "B"), [FD({"C"}, {"A"})])


@pytest.mark.parametrize("K", [NATURALS, NONNEG_RATIONALS, TROPICAL], ids=lambda K: K.tag)
def test_agreement_set_bridge(K):
    """Two-tuple Boolean relation satisfies σ* iff the K version satisfies σ."""
    V = tuple("ABC")
    deps = [CI(x, y, z) for x, y, z in _partitions(V)] + \
           [FD(set(a), set(b)) for a in _subs(V) for b in _subs(V) if b]
    for r in range(len(V) + 1):
        for U in itertools.combinations(V, r):
            B = two_tuple_relation(V, U)
            R = two_tuple_relation(V, U, semiring=K)
            for d in deps:
                assert satisfies(B, star(d, set(V))) == satisfies(R, d), (U, d)


def _subs(V):
    return [c for r in range(len(V) + 1) for c in itertools.combinations(V, r)]


def _partitions(V):
    for lab in itertools.product("xyz", repeat=len(V)):
        part = {c: {v for v, l in zip(V, lab) if l == c} for c in "xyz"}
        if part["y"] and part["z"]:
            yield part["x"], part["y"], part["z"]


# -- derivations ----------------------------------------------------------------------

def test_rule_table_complete():
    assert set(RULES) == {"S1", "S2", "S3", "S4", "S5", "G", "FD1", "FD2", "FD3", "FDCI1",
                          "FDCI2", "MID1", "MID2", "MID3", "MID4", "MVD0", "MVD1", "MVD2",
                          "MVD3", "MVDFD1", "MVDFD2"}


def test_fd_to_mvd_direction():
    ants, concl = conclude("MVDFD1", {"x": ["A"], "y": ["B"]})
    assert ants == [FD({"A"}, {"B"})] and concl == MVD({"A"}, {"B"})


def test_unknown_rule():
    with pytest.raises(RuleError):
        conclude("S9", {})


def test_fdci2_derivation():
    x, y, z = {"A"}, {"B"}, {"C"}
    sigma = [CI(x, y, z), FD(x | y, z)]
    steps = [DerivationStep(sigma[0], "Premise"), DerivationStep(sigma[1], "premise"),
             DerivationStep(FD(x, z), "FDCI2", (1, 2), {"x": ["A"], "y": ["B"], "z": ["C"]})]
    assert check_derivation(V3, sigma, steps)


def test_s1_with_nonempty_z_rejected():
    steps = [DerivationStep(CI({"A"}, {"B"}, {"C"}), "S1", (), {"x": ["A"], "y": ["B"]})]
    res = check_derivation(V3, [], steps)
    assert not res and res.step == 1


def test_bad_premise_reference():
    steps = [DerivationStep(CI({"A"}, {"C"}, {"B"}), "S2", (1,),
                            {"x": ["A"], "y": ["B"], "z": ["C"]})]
    res = check_derivation(V3, [], steps)
    assert not res and "earlier" in res.reason


def test_premise_not_in_sigma():
    res = check_derivation(V3, [], [DerivationStep(FD({"A"}, {"B"}), "Premise")])
    assert not res and res.step == 1


def test_empty_derivation():
    assert not check_derivation(V3, [], [])


def test_mvd3_simulation_script():
    script = load_proof(data_path("mvd3_simulation.proof.json"))
    assert check_dependency_proof(None, None, script)
    assert script.steps[-1].stmt == CI({"A", "D", "E", "G"}, {"C"}, {"B", "F", "H"})


def test_derive_fdci1():
    steps = derive_scifd(V3, [FD({"A"}, {"B"})], CI({"A"}, {"B"}, {"C"}))
    assert [s.rule for s in steps] == ["Premise", "FDCI1"]
    assert check_derivation(V3, [FD({"A"}, {"B"})], steps)


def test_derive_weak_union():
    V = tuple("ABCD")
    sigma = [CI({"A"}, {"B"}, {"C", "D"})]
    tau = CI({"A", "C"}, {"B"}, {"D"})
    steps = derive_scifd(V, sigma, tau)
    assert steps[-1].formula == tau and steps[-1].rule == "S4"
    assert check_derivation(V, sigma, steps)


def test_derive_not_implied():
    tau = CI({"A"}, {"B"}, {"C"})
    assert derive_scifd(V3, [], tau) is None
    assert not implies_scifd(V3, [], tau)


def test_derive_agrees_with_oracle_on_small_instances():
    V = tuple("ABC")
    cands = [CI(x, y, z) for x, y, z in _partitions(V)] + [FD({"A"}, {"B"}), FD({"B"}, {"C"})]
    for s in cands:
        for tau in cands:
            steps = derive_scifd(V, [s], tau)
            implied = implies_scifd(V, [s], tau).holds
            if steps is not None:
                assert implied and check_derivation(V, [s], steps)
            elif implied:
                pytest.fail(f"search missed {tau} from {s}")
