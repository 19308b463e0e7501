"""K-relations: finite maps from tuples to non-zero semiring values."""
from __future__ import annotations

import enum
import io
import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping

from .errors import (CarrierError, DegenerateScaleError, EmptySupportError,
                     ParseError, SchemaError)
from .semiring import Semiring, get_semiring

__all__ = [
    "KRelation", "Outcome", "Equivalence", "as_schema", "equivalent",
    "parse_tsv", "format_tsv", "read_tsv", "write_tsv",
]


def as_schema(names: Iterable[str] | str) -> tuple[str, ...]:
    """Normalize a variable collection to a tuple of unique names.

    A plain string is read as comma separated names (``"A,B"``)."""
    if isinstance(names, str):
        names = [n for n in (s.strip() for s in names.split(",")) if n]
    out = tuple(names)
    for n in out:
        if not isinstance(n, str) or not n:
            raise SchemaError(f"variable names must be non-empty strings, got {n!r}")
    if len(set(out)) != len(out):
        raise SchemaError(f"duplicate variable in {out}")
    return out


class KRelation:
    """A schema, a semiring and a non-empty map from tuples to non-zero values.

    Tuples are stored as Python tuples aligned with ``schema``.  Lookups
    accept either such a tuple or a mapping from variables to tokens.
    Instances are immutable; marginals are memoized.
    """

    __slots__ = ("schema", "semiring", "_entries", "_pos", "_cache")

    def __init__(self, schema, semiring: Semiring, entries, *, _trusted: bool = False):
        self.schema = as_schema(schema)
        self.semiring = semiring
        self._pos = {v: i for i, v in enumerate(self.schema)}
        self._cache: dict = {}
        if _trusted:
            data = entries
        else:
            data = {}
            pairs = entries.items() if isinstance(entries, Mapping) else entries
            for key, val in pairs:
                t = self._key(key)
                if t in data:
                    raise SchemaError(f"duplicate tuple {t}")
                v = semiring.coerce(val)
                if v != semiring.zero:
                    data[t] = v
        if not data:
            raise EmptySupportError("a K-relation needs a non-empty support")
        self._entries = data

    def _key(self, t) -> tuple:
        if isinstance(t, Mapping):
            if set(t) != set(self.schema):
                raise SchemaError(f"tuple over {sorted(t)} does not match schema {self.schema}")
            return tuple(t[v] for v in self.schema)
        t = tuple(t)
        if len(t) != len(self.schema):
            raise SchemaError(f"tuple {t} has arity {len(t)}, schema {self.schema}")
        return t

    # -- mapping protocol --------------------------------------------------
    def __len__(self):
        return len(self._entries)

    def __iter__(self) -> Iterator[tuple]:
        return iter(self._entries)

    def __contains__(self, t):
        return self._key(t) in self._entries

    def __getitem__(self, t):
        return self._entries.get(self._key(t), self.semiring.zero)

    def items(self):
        return self._entries.items()

    def values(self):
        return self._entries.values()

    def support(self) -> frozenset:
        return frozenset(self._entries)

    def as_dicts(self) -> list[tuple[dict, Any]]:
        return [(dict(zip(self.schema, t)), v) for t, v in self._entries.items()]

    # -- structure ---------------------------------------------------------
    def _cols(self, ys) -> tuple[str, ...]:
        ys = set(ys)
        missing = ys - set(self.schema)
        if missing:
            raise SchemaError(f"{sorted(missing)} not in schema {self.schema}")
        return tuple(v for v in self.schema if v in ys)

    def marginal_map(self, ys) -> tuple[tuple[str, ...], dict]:
        """Columns (in schema order) and the marginal as a plain dict.

        Unlike :meth:`marginal` the dict may be empty; zero sums are dropped.
        """
        cols = self._cols(ys)
        hit = self._cache.get(cols)
        if hit is not None:
            return cols, hit
        if len(cols) == len(self.schema):
            out = self._entries
        else:
            idx = [self._pos[c] for c in cols]
            add = self.semiring._add
            acc: dict = {}
            for t, v in self._entries.items():
                k = tuple(t[i] for i in idx)
                acc[k] = add(acc[k], v) if k in acc else v
            zero = self.semiring.zero
            out = {k: v for k, v in acc.items() if v != zero}
        self._cache[cols] = out
        return cols, out

    def marginal(self, ys) -> "KRelation":
        cols, m = self.marginal_map(ys)
        if not m:
            raise EmptySupportError(f"marginal on {list(cols)} sums to zero everywhere")
        if len(cols) == len(self.schema):
            return self
        return KRelation(cols, self.semiring, m, _trusted=True)

    def value(self, assignment: Mapping[str, Any]):
        """Marginal value R(t[Y]) for an assignment over Y ⊆ schema."""
        cols, m = self.marginal_map(assignment.keys())
        return m.get(tuple(assignment[c] for c in cols), self.semiring.zero)

    def active_domain(self, var: str) -> set:
        if var not in self._pos:
            raise SchemaError(f"{var!r} not in schema {self.schema}")
        i = self._pos[var]
        return {t[i] for t in self._entries}

    def scale(self, a) -> "KRelation":
        K = self.semiring
        a = K.coerce(a)
        if a == K.zero:
            raise DegenerateScaleError("cannot scale by zero")
        data = {t: K._mul(a, v) for t, v in self._entries.items()}
        data = {t: v for t, v in data.items() if v != K.zero}
        if not data:
            raise EmptySupportError("scaling annihilated every annotation")
        return KRelation(self.schema, K, data, _trusted=True)

    def reorder(self, schema) -> "KRelation":
        schema = as_schema(schema)
        if set(schema) != set(self.schema):
            raise SchemaError(f"{schema} is not a permutation of {self.schema}")
        if schema == self.schema:
            return self
        idx = [self._pos[v] for v in schema]
        data = {tuple(t[i] for i in idx): v for t, v in self._entries.items()}
        return KRelation(schema, self.semiring, data, _trusted=True)

    def rename(self, mapping: Mapping[str, str]) -> "KRelation":
        schema = tuple(mapping.get(v, v) for v in self.schema)
        return KRelation(schema, self.semiring, dict(self._entries), _trusted=True)

    def total(self):
        return self.semiring.sum(self._entries.values())

    # -- comparison --------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, KRelation):
            return NotImplemented
        if self.semiring is not other.semiring or set(self.schema) != set(other.schema):
            return False
        return self._entries == other.reorder(self.schema)._entries

    def __hash__(self):
        order = tuple(sorted(self.schema))
        canon = self.reorder(order)
        return hash((self.semiring.tag, order, frozenset(canon._entries.items())))

    def __repr__(self):
        K = self.semiring
        rows = ", ".join(f"{t}: {K.format(v)}" for t, v in itertools.islice(self._entries.items(), 6))
        more = ", ..." if len(self) > 6 else ""
        return f"KRelation[{K.tag}]({list(self.schema)}, {{{rows}{more}}})"


class Outcome(enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class Equivalence:
    """Three-valued answer to ``aR = bS`` for some non-zero a, b."""

    outcome: Outcome
    a: Any = None
    b: Any = None

    def __bool__(self):
        return self.outcome is Outcome.YES

    @property
    def unknown(self) -> bool:
        return self.outcome is Outcome.UNKNOWN


def _check_pair(R: KRelation, S: KRelation):
    if R.semiring is not S.semiring:
        raise CarrierError(f"semiring mismatch: {R.semiring.tag} vs {S.semiring.tag}")
    if set(R.schema) != set(S.schema):
        raise SchemaError(f"schema mismatch: {R.schema} vs {S.schema}")


def _witness_holds(K: Semiring, a, b, R: dict, S: dict) -> bool:
    zero, mul = K.zero, K._mul
    if a == zero or b == zero:
        return False
    for t in R.keys() | S.keys():
        if mul(a, R.get(t, zero)) != mul(b, S.get(t, zero)):
            return False
    return True


def _candidate_scalars(K: Semiring, R: dict, S: dict, limit: int = 48) -> list:
    seen: dict = {}
    base = [K.one, *R.values(), *S.values(), K.sum(R.values()), K.sum(S.values())]
    for v in base:
        if v != K.zero:
            seen.setdefault(v, None)
    first = list(seen)
    for u, v in itertools.combinations_with_replacement(first, 2):
        if len(seen) >= limit:
            break
        w = K._mul(u, v)
        if w != K.zero:
            seen.setdefault(w, None)
    return list(seen)


def equivalent(R: KRelation, S: KRelation) -> Equivalence:
    """Decide whether aR = bS for non-zero a, b.

    Complete for positive multiplicatively cancellative semirings.  Elsewhere
    the canonical witness is tried first, then a bounded search over products
    of annotations; failure yields UNKNOWN.
    """
    _check_pair(R, S)
    K = R.semiring
    S = S.reorder(R.schema)
    r, s = R._entries, S._entries
    complete = K.flags.positive and K.flags.mult_cancellative
    if r.keys() != s.keys() and (complete or K.flags.no_zero_divisors):
        # without zero divisors aR and R share their support
        return Equivalence(Outcome.NO)
    if r == s:
        return Equivalence(Outcome.YES, K.one, K.one)
    t0 = next(iter(r))
    a, b = s.get(t0, K.zero), r[t0]
    if _witness_holds(K, a, b, r, s):
        return Equivalence(Outcome.YES, a, b)
    if complete:
        return Equivalence(Outcome.NO)
    cands = _candidate_scalars(K, r, s)
    for a in cands:
        for b in cands:
            if _witness_holds(K, a, b, r, s):
                return Equivalence(Outcome.YES, a, b)
    return Equivalence(Outcome.UNKNOWN)


# -- TSV ---------------------------------------------------------------------

_HEADER = "#semiring:"


def parse_tsv(text: str, semiring: Semiring | str | None = None) -> KRelation:
    """Parse the tab-separated relation format.

    The first line names the semiring; an explicit ``semiring`` argument must
    agree with it (or stand in for a missing header)."""
    if isinstance(semiring, str):
        semiring = get_semiring(semiring)
    lines = [ln.rstrip("\r\n") for ln in io.StringIO(text)]
    lines = [ln for ln in lines if ln.strip()]
    if not lines:
        raise ParseError("empty relation file")
    K = None
    if lines[0].lower().startswith(_HEADER):
        K = get_semiring(lines[0][len(_HEADER):])
        lines = lines[1:]
    if K is None and semiring is None:
        raise ParseError("no '#semiring:' header and no semiring given")
    if K is not None and semiring is not None and K is not semiring:
        raise ParseError(f"file declares {K.tag} but {semiring.tag} was requested")
    K = K or semiring
    if not lines:
        raise ParseError("missing column header")
    header = lines[0].split("\t")
    if header[-1] != "@":
        raise ParseError("column header must end with '@'")
    schema = as_schema(header[:-1])
    rows = []
    for n, ln in enumerate(lines[1:], start=3):
        cells = ln.split("\t")
        if len(cells) != len(header):
            raise ParseError(f"line {n}: expected {len(header)} fields, got {len(cells)}")
        rows.append((tuple(cells[:-1]), K.parse(cells[-1])))
    return KRelation(schema, K, rows)


def format_tsv(R: KRelation) -> str:
    K = R.semiring
    out = [f"{_HEADER} {K.tag}", "\t".join([*R.schema, "@"])]
    for t, v in R.items():
        out.append("\t".join([*(str(x) for x in t), K.format(v)]))
    return "\n".join(out) + "\n"


def read_tsv(path: str | Path, semiring: Semiring | str | None = None) -> KRelation:
    return parse_tsv(Path(path).read_text(encoding="utf-8"), semiring)


def write_tsv(R: KRelation, path: str | Path) -> None:
    Path(path).write_text(format_tsv(R), encoding="utf-8")
