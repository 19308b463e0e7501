"""Dependency syntax (CI, FD, MVD, EMVD, MID) and satisfaction over K-relations.

FDs, MVDs and EMVDs are relational: they are read off the support.  CIs and
MIDs are equations between marginals and use the semiring arithmetic.
Every failed check can report a witness through :func:`find_violation`.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Union

from .errors import CapabilityError, ParseError, SchemaError
from .relation import KRelation

__all__ = [
    "CI", "FD", "MVD", "EMVD", "MID", "Dependency", "Violation",
    "satisfies", "satisfies_ci", "satisfies_fd", "satisfies_mvd", "satisfies_emvd",
    "satisfies_mid", "satisfies_all", "find_violation",
    "is_saturated", "sci_of_mvd", "mvd_of_sci", "ci_of_emvd", "emvd_of_ci", "star",
    "dependency_from_json", "dependency_to_json", "parse_dependencies",
    "load_dependencies", "format_vars",
]


def _vset(xs) -> frozenset:
    if isinstance(xs, str):
        raise SchemaError(f"expected a collection of variable names, got string {xs!r}")
    out = frozenset(xs)
    for v in out:
        if not isinstance(v, str) or not v:
            raise SchemaError(f"bad variable name {v!r}")
    return out


def format_vars(xs) -> str:
    """Compact rendering: ``AB`` for one-letter names, ``A1,B2`` otherwise."""
    names = sorted(xs) if isinstance(xs, (set, frozenset)) else list(xs)
    if all(len(n) == 1 for n in names):
        return "".join(names)
    return ",".join(names)


@dataclass(frozen=True)
class CI:
    """Conditional independence of y and z given x."""

    x: frozenset
    y: frozenset
    z: frozenset

    def __post_init__(self):
        for f in ("x", "y", "z"):
            object.__setattr__(self, f, _vset(getattr(self, f)))
        if self.x & self.y or self.x & self.z or self.y & self.z:
            raise SchemaError(f"CI components must be pairwise disjoint: {self}")

    def variables(self) -> frozenset:
        return self.x | self.y | self.z

    def __str__(self):
        return f"⟂({format_vars(self.x)})({format_vars(self.y)}|{format_vars(self.z)})"


@dataclass(frozen=True)
class FD:
    x: frozenset
    y: frozenset

    def __post_init__(self):
        object.__setattr__(self, "x", _vset(self.x))
        object.__setattr__(self, "y", _vset(self.y))

    def variables(self) -> frozenset:
        return self.x | self.y

    def __str__(self):
        return f"{format_vars(self.x)}→{format_vars(self.y)}"


@dataclass(frozen=True)
class MVD:
    """x ->> y over the whole schema of the relation it is checked on."""

    x: frozenset
    y: frozenset

    def __post_init__(self):
        object.__setattr__(self, "x", _vset(self.x))
        object.__setattr__(self, "y", _vset(self.y))

    def variables(self) -> frozenset:
        return self.x | self.y

    def __str__(self):
        return f"{format_vars(self.x)}↠{format_vars(self.y)}"


@dataclass(frozen=True)
class EMVD:
    """x ->> y | z: the MVD x ->> y on the projection onto x, y, z."""

    x: frozenset
    y: frozenset
    z: frozenset

    def __post_init__(self):
        for f in ("x", "y", "z"):
            object.__setattr__(self, f, _vset(getattr(self, f)))

    def variables(self) -> frozenset:
        return self.x | self.y | self.z

    def __str__(self):
        return f"{format_vars(self.x)}↠{format_vars(self.y)}|{format_vars(self.z)}"


@dataclass(frozen=True)
class MID:
    """Marginal identity: the marginals on sequences x and y agree positionally."""

    x: tuple
    y: tuple

    def __post_init__(self):
        x, y = tuple(self.x), tuple(self.y)
        for seq in (x, y):
            _vset(seq)
            if len(set(seq)) != len(seq):
                raise SchemaError(f"MID sequences need distinct variables: {seq}")
        if len(x) != len(y):
            raise SchemaError(f"MID sides differ in length: {x} vs {y}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def variables(self) -> frozenset:
        return frozenset(self.x) | frozenset(self.y)

    def __str__(self):
        return f"{format_vars(self.x)}≈{format_vars(self.y)}"


Dependency = Union[CI, FD, MVD, EMVD, MID]


@dataclass(frozen=True)
class Violation:
    dependency: Any
    witness: dict

    def __str__(self):
        return f"{self.dependency} violated: {self.witness}"


# -- satisfaction --------------------------------------------------------------

def _guard(R: KRelation, d, allow_nonpositive: bool):
    missing = d.variables() - set(R.schema)
    if missing:
        raise SchemaError(f"{d} mentions {sorted(missing)} outside schema {R.schema}")
    if not allow_nonpositive and not R.semiring.flags.plus_positive:
        raise CapabilityError(
            f"{R.semiring.tag} is not +-positive; dependency checks need that "
            "(pass allow_nonpositive=True to evaluate the raw definition)")


def _proj(R: KRelation, cols: tuple[str, ...]):
    idx = [R.schema.index(c) for c in cols]
    return lambda t: tuple(t[i] for i in idx)


def _ci_violation(R: KRelation, d: CI):
    K = R.semiring
    zero, mul = K.zero, K._mul
    cx, mx = R.marginal_map(d.x)
    cxy, mxy = R.marginal_map(d.x | d.y)
    cxz, mxz = R.marginal_map(d.x | d.z)
    cxyz, mxyz = R.marginal_map(d.x | d.y | d.z)

    def key(a, cols):
        return tuple(a[c] for c in cols)

    # candidates: tuples where one side may be non-zero
    cands = [dict(zip(cxyz, k)) for k in mxyz]
    by_x = defaultdict(list)
    for k in mxz:
        a = dict(zip(cxz, k))
        by_x[key(a, cx)].append(a)
    for k in mxy:
        a = dict(zip(cxy, k))
        for b in by_x.get(key(a, cx), ()):
            c = {**a, **b}
            if key(c, cxyz) not in mxyz:
                cands.append(c)
    for a in cands:
        lhs = mul(mxy.get(key(a, cxy), zero), mxz.get(key(a, cxz), zero))
        rhs = mul(mxyz.get(key(a, cxyz), zero), mx.get(key(a, cx), zero))
        if lhs != rhs:
            return {"tuple": a, "lhs": lhs, "rhs": rhs}
    return None


def _fd_violation(R: KRelation, d: FD):
    px = _proj(R, tuple(v for v in R.schema if v in d.x))
    py = _proj(R, tuple(v for v in R.schema if v in d.y))
    seen: dict = {}
    for t in R:
        k = px(t)
        if k in seen:
            if py(seen[k]) != py(t):
                return {"tuples": [dict(zip(R.schema, seen[k])), dict(zip(R.schema, t))]}
        else:
            seen[k] = t
    return None


def _mvd_rows_violation(rows, cols: tuple[str, ...], x, y):
    """Exchange condition for x ->> y on a set of rows over ``cols``."""
    ix = [i for i, c in enumerate(cols) if c in x]
    iy = [i for i, c in enumerate(cols) if c in y and c not in x]
    iz = [i for i, c in enumerate(cols) if c not in x and c not in y]
    groups: dict = defaultdict(list)
    for r in rows:
        groups[tuple(r[i] for i in ix)].append(r)
    for grp in groups.values():
        present = {(tuple(r[i] for i in iy), tuple(r[i] for i in iz)) for r in grp}
        ys = {p[0] for p in present}
        zs = {p[1] for p in present}
        if len(present) == len(ys) * len(zs):
            continue
        for r in grp:
            for s in grp:
                if (tuple(r[i] for i in iy), tuple(s[i] for i in iz)) not in present:
                    return {"tuples": [dict(zip(cols, r)), dict(zip(cols, s))],
                            "missing": {**{cols[i]: r[i] for i in ix + iy},
                                        **{cols[i]: s[i] for i in iz}}}
    return None


def _mvd_violation(R: KRelation, d: MVD):
    return _mvd_rows_violation(list(R), R.schema, d.x, d.y)


def _emvd_violation(R: KRelation, d: EMVD):
    w = d.variables()
    if R.semiring.flags.plus_positive:
        cols, m = R.marginal_map(w)
        rows = list(m)
    else:
        # relational reading: project the support
        cols = tuple(v for v in R.schema if v in w)
        p = _proj(R, cols)
        rows = list(dict.fromkeys(p(t) for t in R))
    return _mvd_rows_violation(rows, cols, d.x, d.y)


def _mid_violation(R: KRelation, d: MID):
    zero = R.semiring.zero

    def ordered(seq):
        cols, m = R.marginal_map(seq)
        perm = [cols.index(v) for v in seq]
        return {tuple(k[i] for i in perm): v for k, v in m.items()}

    mx, my = ordered(d.x), ordered(d.y)
    for k in list(mx) + [k for k in my if k not in mx]:
        a, b = mx.get(k, zero), my.get(k, zero)
        if a != b:
            return {"values": list(k), "lhs": a, "rhs": b}
    return None


_CHECKS = {CI: _ci_violation, FD: _fd_violation, MVD: _mvd_violation,
           EMVD: _emvd_violation, MID: _mid_violation}


def find_violation(R: KRelation, d: Dependency, *, allow_nonpositive: bool = False):
    """Return a witness dict if R violates d, else None."""
    try:
        check = _CHECKS[type(d)]
    except KeyError:
        raise TypeError(f"not a dependency: {d!r}") from None
    _guard(R, d, allow_nonpositive)
    return check(R, d)


def satisfies(R: KRelation, d: Dependency, *, allow_nonpositive: bool = False) -> bool:
    return find_violation(R, d, allow_nonpositive=allow_nonpositive) is None


def satisfies_ci(R, d: CI, **kw) -> bool:
    return satisfies(R, d, **kw)


def satisfies_fd(R, d: FD, **kw) -> bool:
    return satisfies(R, d, **kw)


def satisfies_mvd(R, d: MVD, **kw) -> bool:
    return satisfies(R, d, **kw)


def satisfies_emvd(R, d: EMVD, **kw) -> bool:
    return satisfies(R, d, **kw)


def satisfies_mid(R, d: MID, **kw) -> bool:
    return satisfies(R, d, **kw)


def satisfies_all(R: KRelation, sigma: Iterable[Dependency], **kw) -> tuple[bool, Violation | None]:
    for d in sigma:
        w = find_violation(R, d, **kw)
        if w is not None:
            return False, Violation(d, w)
    return True, None


# -- saturation view -------------------------------------------------------------

def is_saturated(d: CI, V) -> bool:
    return d.variables() == frozenset(V)


def sci_of_mvd(d: MVD, V) -> CI:
    V = frozenset(V)
    return CI(d.x, d.y - d.x, V - d.x - d.y)


def mvd_of_sci(d: CI) -> MVD:
    return MVD(d.x, d.y)


def ci_of_emvd(d: EMVD) -> CI:
    return CI(d.x, d.y - d.x, d.z - d.x - d.y)


def emvd_of_ci(d: CI) -> EMVD:
    return EMVD(d.x, d.y, d.z)


def star(d: Dependency, V) -> Dependency:
    """Relational counterpart: saturated CIs become MVDs, others EMVDs."""
    if isinstance(d, CI):
        return mvd_of_sci(d) if is_saturated(d, V) else emvd_of_ci(d)
    return d


# -- JSON -------------------------------------------------------------------------

def _names(obj, key):
    if key not in obj:
        raise ParseError(f"missing field {key!r}")
    v = obj[key]
    if not isinstance(v, list) or not all(isinstance(s, str) for s in v):
        raise ParseError(f"field {key!r} must be a list of variable names")
    return v


def dependency_from_json(obj) -> Dependency:
    if isinstance(obj, str):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid dependency JSON: {exc}") from None
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ParseError(f"a dependency is a one-key object, got {obj!r}")
    (tag, body), = obj.items()
    if not isinstance(body, dict):
        raise ParseError(f"dependency body must be an object: {obj!r}")
    try:
        if tag == "ci":
            return CI(_names(body, "x"), _names(body, "y"), _names(body, "z"))
        if tag == "fd":
            return FD(_names(body, "x"), _names(body, "y"))
        if tag == "mvd":
            return MVD(_names(body, "x"), _names(body, "y"))
        if tag == "emvd":
            return EMVD(_names(body, "x"), _names(body, "y"), _names(body, "z"))
        if tag == "mid":
            return MID(tuple(_names(body, "x")), tuple(_names(body, "y")))
    except SchemaError as exc:
        raise ParseError(str(exc)) from None
    raise ParseError(f"unknown dependency kind {tag!r}")


def dependency_to_json(d: Dependency) -> dict:
    s = sorted
    if isinstance(d, CI):
        return {"ci": {"x": s(d.x), "y": s(d.y), "z": s(d.z)}}
    if isinstance(d, FD):
        return {"fd": {"x": s(d.x), "y": s(d.y)}}
    if isinstance(d, MVD):
        return {"mvd": {"x": s(d.x), "y": s(d.y)}}
    if isinstance(d, EMVD):
        return {"emvd": {"x": s(d.x), "y": s(d.y), "z": s(d.z)}}
    if isinstance(d, MID):
        return {"mid": {"x": list(d.x), "y": list(d.y)}}
    raise TypeError(f"not a dependency: {d!r}")


def parse_dependencies(text: str) -> list[Dependency]:
    out = []
    for n, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            out.append(dependency_from_json(line))
        except ParseError as exc:
            raise ParseError(f"line {n}: {exc}") from None
    return out


def load_dependencies(path: str | Path) -> list[Dependency]:
    return parse_dependencies(Path(path).read_text(encoding="utf-8"))
