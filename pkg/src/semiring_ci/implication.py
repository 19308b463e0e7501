"""Implication of saturated CIs and FDs, and checking of rule-by-rule derivations.

The decision procedure is semantic: over positive multiplicatively
cancellative semirings a set of saturated CIs and FDs implies a CI or FD
exactly when the relational counterparts do so on every relation made of
two tuples.  Such a relation is determined by the set of variables on which
its tuples agree, so the check enumerates those sets.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .dependency import (CI, FD, MID, MVD, Dependency, find_violation,
                         satisfies_all, sci_of_mvd, star)
from .errors import PreconditionError, SchemaError
from .relation import KRelation, as_schema
from .semiring import BOOLEAN

__all__ = [
    "Implication", "TwoTupleOracle", "implies_scifd", "two_tuple_relation",
    "DerivationStep", "CheckResult", "RuleError", "RULES", "conclude",
    "check_derivation", "derive_scifd",
]


def two_tuple_relation(V: Sequence[str], agree: Iterable[str], semiring=BOOLEAN) -> KRelation:
    """Two tuples over V that coincide exactly on ``agree`` (annotations one)."""
    V = as_schema(V)
    agree = set(agree)
    t0 = tuple("0" for _ in V)
    t1 = tuple("0" if v in agree else "1" for v in V)
    one = semiring.one
    return KRelation(V, semiring, {t0: one, t1: one} if t1 != t0 else {t0: one})


@dataclass(frozen=True)
class Implication:
    holds: bool
    counterexample: frozenset | None = None

    def __bool__(self):
        return self.holds


def _subsets(V: Sequence[str]):
    for mask in range(1 << len(V)):
        yield frozenset(v for i, v in enumerate(V) if mask >> i & 1)


class TwoTupleOracle:
    """Implication test for a fixed (V, Σ); the Σ-models are computed once."""

    def __init__(self, V, sigma: Iterable[Dependency]):
        self.V = as_schema(V)
        Vset = frozenset(self.V)
        self.sigma = []
        for d in sigma:
            if isinstance(d, MVD):
                d = sci_of_mvd(d, Vset)
            if not isinstance(d, (CI, FD)):
                raise PreconditionError(f"premise {d} is neither a CI nor an FD")
            if not d.variables() <= Vset:
                raise SchemaError(f"premise {d} leaves schema {self.V}")
            if isinstance(d, CI) and d.variables() != Vset:
                raise PreconditionError(f"premise {d} is not saturated over {self.V}")
            self.sigma.append(d)
        rel_sigma = [star(d, Vset) for d in self.sigma]
        self.models: list[tuple[frozenset, KRelation]] = []
        for U in _subsets(self.V):
            R = two_tuple_relation(self.V, U)
            if satisfies_all(R, rel_sigma)[0]:
                self.models.append((U, R))

    def implies(self, tau: Dependency) -> Implication:
        Vset = frozenset(self.V)
        if not tau.variables() <= Vset:
            raise SchemaError(f"{tau} leaves schema {self.V}")
        if isinstance(tau, MID):
            raise PreconditionError("marginal identities are outside the SCI+FD fragment")
        t = star(tau, Vset)
        for U, R in self.models:
            if find_violation(R, t) is not None:
                return Implication(False, U)
        return Implication(True)


def implies_scifd(V, sigma: Iterable[Dependency], tau: Dependency) -> Implication:
    return TwoTupleOracle(V, sigma).implies(tau)


# -- derivations -----------------------------------------------------------------

class RuleError(Exception):
    """A rule instantiation is malformed or does not fit its premises."""


@dataclass(frozen=True)
class DerivationStep:
    """One line of a derivation.

    ``premises`` are 1-based numbers of earlier steps; ``inst`` binds the
    rule's metavariables (``x``, ``y``, ``z``, ``w``, ``zp`` to variable
    collections, ``idx`` to positions for projection of identities).
    """

    formula: Any
    rule: str
    premises: tuple = ()
    inst: dict = field(default_factory=dict, hash=False, compare=False)


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    step: int | None = None
    reason: str = ""

    def __bool__(self):
        return self.ok

    def __str__(self):
        return "valid" if self.ok else f"step {self.step}: {self.reason}"


def _s(inst, key, required=True) -> frozenset:
    if key not in inst:
        if required:
            raise RuleError(f"missing binding {key!r}")
        return frozenset()
    v = inst[key]
    if isinstance(v, str):
        raise RuleError(f"binding {key!r} must be a list of variables")
    return frozenset(v)


def _seq(inst, key) -> tuple:
    if key not in inst:
        raise RuleError(f"missing binding {key!r}")
    return tuple(inst[key])


def _mk(cls, *args):
    try:
        return cls(*args)
    except SchemaError as exc:
        raise RuleError(f"instantiation yields an ill-formed formula: {exc}") from None


def _need(cond, msg):
    if not cond:
        raise RuleError(msg)


# Each rule maps (bindings, V) to (antecedents, conclusion).
def _r_s1(i, V):
    return [], _mk(CI, _s(i, "x"), _s(i, "y"), frozenset())


def _r_s2(i, V):
    x, y, z = _s(i, "x"), _s(i, "y"), _s(i, "z")
    return [_mk(CI, x, y, z)], _mk(CI, x, z, y)


def _r_s3(i, V):
    x, y, z, w = _s(i, "x"), _s(i, "y"), _s(i, "z"), _s(i, "w")
    return [_mk(CI, x, y, z | w)], _mk(CI, x, y, z)


def _r_s4(i, V):
    x, y, z, w = _s(i, "x"), _s(i, "y"), _s(i, "z"), _s(i, "w")
    _need(not z & w, "z and w must be disjoint")
    return [_mk(CI, x, y, z | w)], _mk(CI, x | z, y, w)


def _r_s5(i, V):
    x, y, z, w = _s(i, "x"), _s(i, "y"), _s(i, "z"), _s(i, "w")
    _need(not z & w, "z and w must be disjoint")
    return [_mk(CI, x, y, z), _mk(CI, x | z, y, w)], _mk(CI, x, y, z | w)


def _r_g(i, V):
    x, y, z, w = _s(i, "x"), _s(i, "y"), _s(i, "z"), _s(i, "w")
    _need(not z & w, "z and w must be disjoint")
    return [_mk(CI, x | w, y, z), _mk(CI, x | z, y, w)], _mk(CI, x, y, z | w)


def _r_fd1(i, V):
    x, y = _s(i, "x"), _s(i, "y")
    _need(y <= x, "reflexivity needs y ⊆ x")
    return [], FD(x, y)


def _r_fd2(i, V):
    x, y, z = _s(i, "x"), _s(i, "y"), _s(i, "z")
    return [FD(x, y)], FD(x | z, y | z)


def _r_fd3(i, V):
    x, y, z = _s(i, "x"), _s(i, "y"), _s(i, "z")
    return [FD(x, y), FD(y, z)], FD(x, z)


def _r_fdci1(i, V):
    x, y, z = _s(i, "x"), _s(i, "y"), _s(i, "z")
    return [FD(x, y)], _mk(CI, x, y, z)


def _r_fdci2(i, V):
    x, y, z = _s(i, "x"), _s(i, "y"), _s(i, "z")
    return [_mk(CI, x, y, z), FD(x | y, z)], FD(x, z)


def _r_mid1(i, V):
    x = _seq(i, "x")
    return [], _mk(MID, x, x)


def _r_mid2(i, V):
    x, y = _seq(i, "x"), _seq(i, "y")
    return [_mk(MID, x, y)], _mk(MID, y, x)


def _r_mid3(i, V):
    x, y = _seq(i, "x"), _seq(i, "y")
    idx = _seq(i, "idx")
    _need(len(set(idx)) == len(idx), "projection indices must be distinct")
    _need(all(isinstance(k, int) and 0 <= k < len(x) for k in idx),
          "projection index out of range")
    return [_mk(MID, x, y)], _mk(MID, tuple(x[k] for k in idx), tuple(y[k] for k in idx))


def _r_mid4(i, V):
    x, y, z = _seq(i, "x"), _seq(i, "y"), _seq(i, "z")
    return [_mk(MID, x, y), _mk(MID, y, z)], _mk(MID, x, z)


def _universe(V):
    _need(V is not None, "MVD rules need the schema V")
    return frozenset(V)


def _r_mvd0(i, V):
    x, y, z = _s(i, "x"), _s(i, "y"), _s(i, "z")
    _need(x | y | z == _universe(V), "complementation needs x ∪ y ∪ z = V")
    _need(y & z <= x, "complementation needs y ∩ z ⊆ x")
    return [MVD(x, y)], MVD(x, z)


def _r_mvd1(i, V):
    x, y = _s(i, "x"), _s(i, "y")
    _need(y <= x, "reflexivity needs y ⊆ x")
    return [], MVD(x, y)


def _r_mvd2(i, V):
    x, y, z, w = _s(i, "x"), _s(i, "y"), _s(i, "z"), _s(i, "w")
    _need(z <= w, "augmentation needs z ⊆ w")
    return [MVD(x, y)], MVD(x | w, y | z)


def _r_mvd3(i, V):
    x, y, z = _s(i, "x"), _s(i, "y"), _s(i, "z")
    return [MVD(x, y), MVD(y, z)], MVD(x, z - y)


def _r_mvdfd1(i, V):
    x, y = _s(i, "x"), _s(i, "y")
    return [FD(x, y)], MVD(x, y)


def _r_mvdfd2(i, V):
    x, y, z, zp = _s(i, "x"), _s(i, "y"), _s(i, "z"), _s(i, "zp")
    _need(zp <= z, "coalescence needs zp ⊆ z")
    _need(not y & z, "coalescence needs y ∩ z = ∅")
    return [MVD(x, z), FD(y, zp)], FD(x, zp)


RULES = {
    "S1": _r_s1, "S2": _r_s2, "S3": _r_s3, "S4": _r_s4, "S5": _r_s5, "G": _r_g,
    "FD1": _r_fd1, "FD2": _r_fd2, "FD3": _r_fd3, "FDCI1": _r_fdci1, "FDCI2": _r_fdci2,
    "MID1": _r_mid1, "MID2": _r_mid2, "MID3": _r_mid3, "MID4": _r_mid4,
    "MVD0": _r_mvd0, "MVD1": _r_mvd1, "MVD2": _r_mvd2, "MVD3": _r_mvd3,
    "MVDFD1": _r_mvdfd1, "MVDFD2": _r_mvdfd2,
}


def conclude(rule: str, inst: dict, V=None):
    """Antecedents and conclusion of a rule instance; raises RuleError."""
    try:
        fn = RULES[rule.upper()]
    except KeyError:
        raise RuleError(f"unknown rule {rule!r}") from None
    return fn(inst, V)


def check_rule_step(rule: str, inst: dict, premises: list, formula, V=None) -> None:
    """Raise RuleError unless ``formula`` follows from ``premises`` by the rule."""
    ants, concl = conclude(rule, inst, V)
    if len(premises) != len(ants):
        raise RuleError(f"{rule} takes {len(ants)} premise(s), {len(premises)} cited")
    for k, (got, want) in enumerate(zip(premises, ants), start=1):
        if got != want:
            raise RuleError(f"premise {k} is {got}, rule instance needs {want}")
    if formula != concl:
        raise RuleError(f"rule instance concludes {concl}, step states {formula}")


def check_derivation(V, sigma: Iterable[Dependency], steps: Sequence[DerivationStep]) -> CheckResult:
    """Verify a derivation line by line; the first bad step is reported."""
    Vset = frozenset(as_schema(V)) if V is not None else None
    sigma = list(sigma)
    done: list = []
    for n, st in enumerate(steps, start=1):
        try:
            if Vset is not None and not st.formula.variables() <= Vset:
                raise RuleError(f"{st.formula} leaves schema")
            bad = [p for p in st.premises if not (isinstance(p, int) and 1 <= p < n)]
            if bad:
                raise RuleError(f"premise reference(s) {bad} do not point to earlier steps")
            if st.rule.lower() == "premise":
                if st.premises:
                    raise RuleError("a premise step cites no steps")
                if st.formula not in sigma:
                    raise RuleError(f"{st.formula} is not among the premises")
            else:
                check_rule_step(st.rule, st.inst, [done[p - 1] for p in st.premises],
                                st.formula, Vset)
        except RuleError as exc:
            return CheckResult(False, n, str(exc))
        done.append(st.formula)
    if not steps:
        return CheckResult(False, 0, "empty derivation")
    return CheckResult(True)


# -- best-effort proof search ---------------------------------------------------------

def _nonempty_proper_subsets(s: frozenset):
    items = sorted(s)
    for r in range(1, len(items)):
        for c in itertools.combinations(items, r):
            yield frozenset(c)


def _nonempty_subsets(s: frozenset):
    items = sorted(s)
    for r in range(1, len(items) + 1):
        for c in itertools.combinations(items, r):
            yield frozenset(c)


def _lst(s) -> list:
    return sorted(s)


def derive_scifd(V, sigma: Iterable[Dependency], tau: Dependency,
                 budget: int = 20000) -> list[DerivationStep] | None:
    """Breadth-first closure of Σ under S1-S5, FD1-FD3 and FDCI1-2.

    Returns a derivation ending in ``tau`` or None when the closure (or the
    budget, counted in derived formulas) is exhausted.
    """
    Vset = frozenset(as_schema(V))
    sigma = list(sigma)
    # formula -> (rule, inst, premise formulas)
    how: dict = {}
    queue: deque = deque()

    def add(f, rule, inst, prems):
        if f in how:
            return False
        how[f] = (rule, inst, prems)
        queue.append(f)
        return f == tau

    def emit():
        steps: list[DerivationStep] = []
        num: dict = {}

        def visit(f):
            if f in num:
                return num[f]
            rule, inst, prems = how[f]
            refs = tuple(visit(p) for p in prems)
            steps.append(DerivationStep(f, rule, refs, inst))
            num[f] = len(steps)
            return num[f]

        visit(tau)
        return steps

    if isinstance(tau, CI) and not (tau.y and tau.z):
        if not tau.z:
            add(tau, "S1", {"x": _lst(tau.x), "y": _lst(tau.y)}, [])
        else:
            # z-only: triviality followed by symmetry
            base = CI(tau.x, tau.z, frozenset())
            how[base] = ("S1", {"x": _lst(tau.x), "y": _lst(tau.z)}, [])
            how[tau] = ("S2", {"x": _lst(tau.x), "y": _lst(tau.z), "z": []}, [base])
        return emit()
    if isinstance(tau, FD) and tau.y <= tau.x:
        how[tau] = ("FD1", {"x": _lst(tau.x), "y": _lst(tau.y)}, [])
        return emit()
    for d in sigma:
        if add(d, "Premise", {}, []):
            return emit()

    while queue and len(how) < budget:
        f = queue.popleft()
        if isinstance(f, CI):
            x, y, z = f.x, f.y, f.z
            if add(CI(x, z, y), "S2", {"x": _lst(x), "y": _lst(y), "z": _lst(z)}, [f]):
                return emit()
            for zz in _nonempty_proper_subsets(z):
                w = z - zz
                i = {"x": _lst(x), "y": _lst(y), "z": _lst(zz), "w": _lst(w)}
                if add(CI(x, y, zz), "S3", i, [f]):
                    return emit()
                if add(CI(x | zz, y, w), "S4", i, [f]):
                    return emit()
            for g in list(how):
                if not isinstance(g, CI) or g.y != y:
                    continue
                # f = ⟂(X)(Y|Z), g = ⟂(XZ)(Y|W)
                if g.x == x | z and not g.z & z:
                    i = {"x": _lst(x), "y": _lst(y), "z": _lst(z), "w": _lst(g.z)}
                    if add(CI(x, y, z | g.z), "S5", i, [f, g]):
                        return emit()
                # g = ⟂(X)(Y|Z), f = ⟂(XZ)(Y|W)
                if x == g.x | g.z and not g.z & z and g.x != x:
                    i = {"x": _lst(g.x), "y": _lst(y), "z": _lst(g.z), "w": _lst(z)}
                    if add(CI(g.x, y, g.z | z), "S5", i, [g, f]):
                        return emit()
            xy_fd = FD(x | y, z)
            if xy_fd in how:
                if add(FD(x, z), "FDCI2", {"x": _lst(x), "y": _lst(y), "z": _lst(z)}, [f, xy_fd]):
                    return emit()
        elif isinstance(f, FD):
            x, y = f.x, f.y
            for yy in _nonempty_proper_subsets(y):
                refl = FD(y, yy)
                if refl not in how:
                    how[refl] = ("FD1", {"x": _lst(y), "y": _lst(yy)}, [])
                if add(FD(x, yy), "FD3", {"x": _lst(x), "y": _lst(y), "z": _lst(yy)}, [f, refl]):
                    return emit()
            for z in _nonempty_subsets(Vset - x - y):
                if add(FD(x | z, y | z), "FD2", {"x": _lst(x), "y": _lst(y), "z": _lst(z)}, [f]):
                    return emit()
            if y and not x & y:
                for z in _nonempty_subsets(Vset - x - y):
                    if add(CI(x, y, z), "FDCI1", {"x": _lst(x), "y": _lst(y), "z": _lst(z)}, [f]):
                        return emit()
            for g in list(how):
                if isinstance(g, FD):
                    if g.x == y and add(FD(x, g.y), "FD3",
                                        {"x": _lst(x), "y": _lst(y), "z": _lst(g.y)}, [f, g]):
                        return emit()
                    if g.y == x and add(FD(g.x, y), "FD3",
                                        {"x": _lst(g.x), "y": _lst(x), "z": _lst(y)}, [g, f]):
                        return emit()
                elif isinstance(g, CI) and g.x | g.y == x and g.z == y:
                    if add(FD(g.x, y), "FDCI2",
                           {"x": _lst(g.x), "y": _lst(g.y), "z": _lst(y)}, [g, f]):
                        return emit()
    return None
