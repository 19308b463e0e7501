"""Shannon entropy of probability-semiring relations (floating point, base 2)."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

from .dependency import CI
from .errors import CapabilityError, SchemaError
from .relation import KRelation
from .semiring import Kind

__all__ = ["TOL", "MAX_VECTOR_VARS", "EntropicVector", "entropy", "entropic_vector",
           "cmi", "ci_via_cmi", "polymatroid_violations", "zhang_yeung_value"]

TOL = 1e-9
MAX_VECTOR_VARS = 16
_PROB_KINDS = (Kind.NONNEG_RATIONALS, Kind.NATURALS)


def _require_probability(R: KRelation):
    if R.semiring.kind not in _PROB_KINDS:
        raise CapabilityError(
            f"entropy needs non-negative rational (or count) annotations, not {R.semiring.tag}")


def entropy(R: KRelation, ys: Iterable[str]) -> float:
    """Entropy in bits of the marginal on ys after normalizing R to total mass one."""
    _require_probability(R)
    _, m = R.marginal_map(ys)
    total = sum(m.values())
    out = 0.0
    for v in m.values():
        p = float(v / total)
        if p > 0:
            out -= p * math.log2(p)
    return out + 0.0  # avoid returning -0.0


@dataclass(frozen=True)
class EntropicVector:
    universe: tuple
    values: Mapping[frozenset, float]

    def __getitem__(self, s: Iterable[str]) -> float:
        s = frozenset(s)
        if not s <= set(self.universe):
            raise SchemaError(f"{sorted(s)} is not within {self.universe}")
        return self.values[s]

    def to_json(self) -> dict:
        items = sorted(self.values.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))
        return {",".join(sorted(s)): v for s, v in items}


def entropic_vector(R: KRelation) -> EntropicVector:
    _require_probability(R)
    n = len(R.schema)
    if n > MAX_VECTOR_VARS:
        raise SchemaError(f"{n} variables exceed the limit of {MAX_VECTOR_VARS}")
    vals = {}
    for r in range(n + 1):
        for c in itertools.combinations(R.schema, r):
            vals[frozenset(c)] = entropy(R, c) if c else 0.0
    return EntropicVector(R.schema, vals)


def cmi(hv: EntropicVector, ys: Iterable[str], zs: Iterable[str], xs: Iterable[str] = ()) -> float:
    """I(Y;Z|X) = h(XY) + h(XZ) - h(X) - h(XYZ)."""
    x, y, z = frozenset(xs), frozenset(ys), frozenset(zs)
    return hv[x | y] + hv[x | z] - hv[x] - hv[x | y | z]


def ci_via_cmi(R: KRelation, d: CI, tol: float = TOL) -> bool:
    hv = entropic_vector(R.marginal(d.variables()))
    return abs(cmi(hv, d.y, d.z, d.x)) <= tol


def polymatroid_violations(hv: EntropicVector, tol: float = TOL) -> list[tuple]:
    """Monotonicity and submodularity instances that fail by more than tol."""
    subsets = list(hv.values)
    bad = []
    if abs(hv.values[frozenset()]) > tol:
        bad.append(("empty", frozenset()))
    for a, b in itertools.product(subsets, repeat=2):
        if a <= b and hv.values[a] - hv.values[b] > tol:
            bad.append(("mono", a, b))
        s = hv.values[a] + hv.values[b] - hv.values[a & b] - hv.values[a | b]
        if s < -tol:
            bad.append(("submod", a, b))
    return bad


def zhang_yeung_value(hv: EntropicVector, a: str, b: str, c: str, d: str) -> float:
    """Left side of the Zhang-Yeung inequality (non-negative on entropic vectors):

    -I(A;B) + 2I(A;B|D) + I(A;B|C) + I(C;D) + I(A;D|B) + I(B;D|A)
    """
    A, B, C, D = [a], [b], [c], [d]
    return (-cmi(hv, A, B) + 2 * cmi(hv, A, B, D) + cmi(hv, A, B, C) + cmi(hv, C, D)
            + cmi(hv, A, D, B) + cmi(hv, B, D, A))
