"""Joins of K-relations, lossless-join checks and 4NF normalization."""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping

from .dependency import CI, FD, Dependency, MVD, sci_of_mvd
from .errors import CarrierError, SchemaError
from .implication import TwoTupleOracle
from .relation import Equivalence, KRelation, Outcome, as_schema, equivalent

__all__ = [
    "c_star", "c_excl", "multiplicative_join", "join", "is_lossless",
    "Lossless", "Split", "DecompositionPlan", "normalize_4nf", "reconstruct",
]


def c_star(R: KRelation, Z: Iterable[str]):
    """Product of all non-zero values of the marginal on Z (one if there are none)."""
    _, m = R.marginal_map(Z)
    return R.semiring.prod(m.values())


def _excl_table(R: KRelation, Z) -> tuple[tuple, dict, Any]:
    """c_excl for every tuple in the marginal support, via prefix/suffix products."""
    K = R.semiring
    cols, m = R.marginal_map(Z)
    keys = list(m)
    vals = [m[k] for k in keys]
    pre = [K.one]
    for v in vals:
        pre.append(K._mul(pre[-1], v))
    suf = [K.one]
    for v in reversed(vals):
        suf.append(K._mul(suf[-1], v))
    suf.reverse()
    table = {k: K._mul(pre[i], suf[i + 1]) for i, k in enumerate(keys)}
    return cols, table, pre[-1]


def c_excl(R: KRelation, Z: Iterable[str], u):
    """Product of the marginal on Z over its support with u left out.

    ``u`` is a mapping over Z or a tuple in schema order of Z.
    """
    cols, table, total = _excl_table(R, Z)
    if isinstance(u, Mapping):
        if set(u) != set(cols):
            raise SchemaError(f"tuple over {sorted(u)} is not over {list(cols)}")
        u = tuple(u[c] for c in cols)
    else:
        u = tuple(u)
    return table.get(u, total)


def _join_plan(R: KRelation, S: KRelation):
    if R.semiring is not S.semiring:
        raise CarrierError(f"semiring mismatch: {R.semiring.tag} vs {S.semiring.tag}")
    overlap = tuple(v for v in S.schema if v in set(R.schema))
    extra = tuple(v for v in S.schema if v not in set(R.schema))
    ri = [R.schema.index(v) for v in overlap]
    si = [S.schema.index(v) for v in overlap]
    ei = [S.schema.index(v) for v in extra]
    groups = defaultdict(list)
    for s, v in S.items():
        groups[tuple(s[i] for i in si)].append((tuple(s[i] for i in ei), v))
    return overlap, R.schema + extra, ri, groups


def multiplicative_join(R: KRelation, S: KRelation) -> KRelation:
    """(R*S)(t) = R(t[X]) ⊗ S(t[Y]); zero products are dropped."""
    K = R.semiring
    _, schema, ri, groups = _join_plan(R, S)
    out = {}
    for r, a in R.items():
        for ext, b in groups.get(tuple(r[i] for i in ri), ()):
            v = K._mul(a, b)
            if v != K.zero:
                out[r + ext] = v
    return KRelation(schema, K, out, _trusted=True) if out else KRelation(schema, K, out)


def join(R: KRelation, S: KRelation) -> KRelation:
    """(R⋈S)(t) = R(t[X]) ⊗ S(t[Y]) ⊗ c_excl(S, X∩Y, t[X∩Y])."""
    K = R.semiring
    overlap, schema, ri, groups = _join_plan(R, S)
    ocols, table, total = _excl_table(S, overlap)
    # _excl_table orders the overlap by S's schema, as does _join_plan
    assert ocols == overlap
    out = {}
    for r, a in R.items():
        u = tuple(r[i] for i in ri)
        c = table.get(u, total)
        for ext, b in groups.get(u, ()):
            v = K._mul(K._mul(a, b), c)
            if v != K.zero:
                out[r + ext] = v
    return KRelation(schema, K, out, _trusted=True) if out else KRelation(schema, K, out)


@dataclass(frozen=True)
class Lossless:
    """Verdict of :func:`is_lossless`; ``joined`` is the recombined relation."""

    outcome: Outcome
    a: Any = None
    b: Any = None
    joined: KRelation | None = None

    def __bool__(self):
        return self.outcome is Outcome.YES


def is_lossless(R: KRelation, left: Iterable[str], right: Iterable[str]) -> Lossless:
    left, right = as_schema(left), as_schema(right)
    if set(left) | set(right) != set(R.schema):
        raise SchemaError(f"{left} and {right} do not cover {R.schema}")
    J = join(R.marginal(left), R.marginal(right))
    eq: Equivalence = equivalent(J, R)
    return Lossless(eq.outcome, eq.a, eq.b, J)


# -- normalization -----------------------------------------------------------------

@dataclass(frozen=True)
class Split:
    parent: tuple
    left: tuple
    right: tuple
    mvd: CI  # ⟂(X)(Y|Z) with left = XY and right = XZ

    def to_json(self) -> dict:
        x = sorted(self.mvd.x)
        return {"parent": list(self.parent), "split": [list(self.left), list(self.right)],
                "mvd": {"x": x, "y": sorted(self.mvd.y), "z": sorted(self.mvd.z)}}


@dataclass
class DecompositionPlan:
    schemas: list[tuple]
    steps: list[Split] = field(default_factory=list)
    certificate: Any = None

    def to_json(self) -> dict:
        return {"schemas": [list(s) for s in self.schemas],
                "steps": [s.to_json() for s in self.steps]}


def _shortlex(s: Iterable[str]):
    t = tuple(sorted(s))
    return (len(t), t)


def _fd_closure(x: frozenset, fds: list[FD]) -> frozenset:
    out = set(x)
    changed = True
    while changed:
        changed = False
        for d in fds:
            if d.x <= out and not d.y <= out:
                out |= d.y
                changed = True
    return frozenset(out)


def _local_sigma(S: frozenset, cis: list[CI], fds: list[FD]) -> list[Dependency]:
    """Dependencies that provably hold on the projection onto S, saturated on S."""
    out: list[Dependency] = []
    for d in cis:
        if d.x <= S <= d.variables():
            y, z = d.y & S, d.z & S
            if y and z:
                out.append(CI(d.x, y, z))
    if fds:
        items = sorted(S)
        for r in range(len(items) + 1):
            for xs in itertools.combinations(items, r):
                x = frozenset(xs)
                gain = (_fd_closure(x, fds) & S) - x
                if gain:
                    out.append(FD(x, gain))
    return list(dict.fromkeys(out))


def _violating_mvd(S: tuple, sigma_s: list[Dependency]):
    if not sigma_s:
        return None
    oracle = TwoTupleOracle(S, sigma_s)
    Sset = frozenset(S)
    xs = sorted((frozenset(c) for r in range(len(S) - 1)
                 for c in itertools.combinations(S, r)), key=_shortlex)
    for x in xs:
        rest = Sset - x
        if oracle.implies(FD(x, Sset)):
            continue  # superkey
        ys = sorted((frozenset(c) for r in range(1, len(rest))
                     for c in itertools.combinations(sorted(rest), r)), key=_shortlex)
        for y in ys:
            d = CI(x, y, rest - y)
            if oracle.implies(d):
                return d
    return None


def normalize_4nf(schema, sigma: Iterable[Dependency]) -> DecompositionPlan:
    """Split along implied MVDs whose left side is not a superkey until none is left.

    A CI in Σ is used on every subschema S with x ⊆ S ⊆ x∪y∪z, restricted to
    S (a decomposition-rule consequence).  FDs are projected through their
    closure.  Among subschemas, and among MVDs on a subschema, the first in
    shortlex order of (left side, right side) is taken.
    """
    V = as_schema(schema)
    cis, fds = [], []
    for d in sigma:
        if isinstance(d, MVD):
            d = sci_of_mvd(d, V)
        if isinstance(d, CI):
            cis.append(d)
        elif isinstance(d, FD):
            fds.append(d)
        else:
            raise SchemaError(f"normalization takes CIs and FDs, got {d}")
    order = {v: i for i, v in enumerate(V)}

    def ordered(s):
        return tuple(sorted(s, key=order.__getitem__))

    plan = [V]
    steps: list[Split] = []
    while True:
        hit = None
        for S in sorted(plan, key=lambda s: tuple(sorted(s))):
            d = _violating_mvd(S, _local_sigma(frozenset(S), cis, fds))
            if d is not None:
                hit = (S, d)
                break
        if hit is None:
            break
        S, d = hit
        left, right = ordered(d.x | d.y), ordered(d.x | d.z)
        plan.remove(S)
        plan.extend(s for s in (left, right) if s not in plan)
        steps.append(Split(S, left, right, d))
    plan.sort(key=lambda s: tuple(sorted(s)))
    return DecompositionPlan([tuple(sorted(s)) for s in plan], steps)


def reconstruct(R: KRelation, plan: DecompositionPlan) -> KRelation:
    """Rejoin the projections of R by replaying the plan's splits bottom-up."""

    def build(S: tuple) -> KRelation:
        for st in plan.steps:
            if st.parent == S:
                return join(build(st.left), build(st.right))
        return R.marginal(S)

    root = plan.steps[0].parent if plan.steps else tuple(R.schema)
    return build(root)
