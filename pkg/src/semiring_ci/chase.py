"""The chase for EMVD implication over ordinary relations (FDs included).

Start from two tuples that agree on the left side of the goal, then repair
violations of Σ one at a time: an EMVD adds the missing exchange tuple
(fresh tokens elsewhere), an FD merges tokens.  The goal holds once some
tuple combines the relevant parts of the two seed tuples.
"""
from __future__ import annotations

import copy
import os
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .dependency import CI, EMVD, FD, MVD, Dependency, emvd_of_ci
from .errors import IntegrityError, PreconditionError
from .relation import Outcome

__all__ = ["ChaseState", "TraceEntry", "ChaseResult", "chase_emvd", "replay_trace",
           "initial_state", "default_max_steps", "MAX_STEPS_ENV"]

MAX_STEPS_ENV = "SEMIRING_CI_MAX_STEPS"
_DEFAULT_MAX_STEPS = 10_000


def default_max_steps() -> int:
    raw = os.environ.get(MAX_STEPS_ENV)
    if raw is None or not raw.strip():
        return _DEFAULT_MAX_STEPS
    try:
        n = int(raw)
    except ValueError:
        raise PreconditionError(f"{MAX_STEPS_ENV}={raw!r} is not an integer") from None
    if n < 0:
        raise PreconditionError(f"{MAX_STEPS_ENV} must be non-negative")
    return n


def _token(var: str, n: int) -> str:
    return f"{var}_{n}"


def _token_index(tok: str) -> int:
    return int(tok.rsplit("_", 1)[1])


@dataclass(frozen=True)
class TraceEntry:
    dependency: Dependency
    index: int               # position of the dependency in the chase order
    pair: tuple[int, int]    # tuple positions at the time of the step
    new: tuple | None = None            # EMVD: the added tuple
    merges: tuple = ()                  # FD: (variable, dropped token, kept token)

    def to_json(self) -> dict:
        from .dependency import dependency_to_json
        out = {"dependency": dependency_to_json(self.dependency), "index": self.index,
               "pair": list(self.pair)}
        if self.new is not None:
            out["new"] = list(self.new)
        if self.merges:
            out["merges"] = [list(m) for m in self.merges]
        return out


@dataclass
class ChaseState:
    schema: tuple
    tuples: list
    counters: dict
    trace: list = field(default_factory=list)
    second: int = 1          # position of the (possibly merged) second seed tuple

    def fresh(self, var: str) -> str:
        n = self.counters[var]
        self.counters[var] = n + 1
        return _token(var, n)

    def rows(self) -> list[dict]:
        return [dict(zip(self.schema, t)) for t in self.tuples]


@dataclass
class ChaseResult:
    outcome: Outcome
    state: ChaseState
    steps: int
    initial: ChaseState | None = None

    def __bool__(self):
        return self.outcome is Outcome.YES

    @property
    def verdict(self) -> str:
        return {Outcome.YES: "Implied", Outcome.NO: "NotImplied",
                Outcome.UNKNOWN: "Unknown"}[self.outcome]


def _as_emvd(d: Dependency, V: frozenset) -> Dependency:
    if isinstance(d, EMVD) or isinstance(d, FD):
        return d
    if isinstance(d, CI):
        return emvd_of_ci(d)
    if isinstance(d, MVD):
        return EMVD(d.x, d.y, V)
    raise PreconditionError(f"the chase handles EMVDs, MVDs, CIs and FDs, not {d}")


def _order(sigma: Sequence[Dependency], V: frozenset) -> list[Dependency]:
    conv = [_as_emvd(d, V) for d in sigma]
    return [d for d in conv if isinstance(d, EMVD)] + [d for d in conv if isinstance(d, FD)]


def initial_state(schema: Sequence[str], tau: EMVD) -> ChaseState:
    schema = tuple(schema)
    t0 = tuple(_token(v, 0) for v in schema)
    t1 = tuple(_token(v, 0) if v in tau.x else _token(v, 1) for v in schema)
    counters = {v: (1 if v in tau.x else 2) for v in schema}
    return ChaseState(schema, [t0, t1], counters)


def _cols(schema, vs) -> list[int]:
    return [i for i, v in enumerate(schema) if v in vs]


def _goal_reached(st: ChaseState, tau: EMVD) -> bool:
    a = _cols(st.schema, tau.x | tau.y)
    b = _cols(st.schema, tau.z - tau.x - tau.y)
    t0, t1 = st.tuples[0], st.tuples[st.second]
    want = (tuple(t0[i] for i in a), tuple(t1[i] for i in b))
    return any((tuple(t[i] for i in a), tuple(t[i] for i in b)) == want for t in st.tuples)


def _emvd_violation(st: ChaseState, d: EMVD):
    ix = _cols(st.schema, d.x)
    iy = _cols(st.schema, d.x | d.y)
    iz = _cols(st.schema, d.z - d.x - d.y)
    present = {(tuple(t[i] for i in iy), tuple(t[i] for i in iz)) for t in st.tuples}
    for i, t in enumerate(st.tuples):
        kx = tuple(t[k] for k in ix)
        ky = tuple(t[k] for k in iy)
        for j, s in enumerate(st.tuples):
            if i == j or tuple(s[k] for k in ix) != kx:
                continue
            if (ky, tuple(s[k] for k in iz)) not in present:
                return i, j
    return None


def _emvd_tuple(st: ChaseState, d: EMVD, i: int, j: int) -> tuple:
    t, s = st.tuples[i], st.tuples[j]
    keep = d.x | d.y
    other = d.z - keep
    return tuple(t[k] if v in keep else s[k] if v in other else st.fresh(v)
                 for k, v in enumerate(st.schema))


def _fd_violation(st: ChaseState, d: FD):
    ix = _cols(st.schema, d.x)
    iy = _cols(st.schema, d.y)
    for i, t in enumerate(st.tuples):
        for j, s in enumerate(st.tuples):
            if i < j and all(t[k] == s[k] for k in ix) and any(t[k] != s[k] for k in iy):
                return i, j
    return None


def _fd_merges(st: ChaseState, d: FD, i: int, j: int) -> tuple:
    t, s = st.tuples[i], st.tuples[j]
    out = []
    for k in _cols(st.schema, d.y):
        if t[k] != s[k]:
            keep, drop = sorted((t[k], s[k]), key=_token_index)
            out.append((st.schema[k], drop, keep))
    return tuple(out)


def _apply_merges(st: ChaseState, merges: tuple) -> None:
    sub = {(st.schema.index(v), drop): keep for v, drop, keep in merges}
    rows = [tuple(sub.get((k, x), x) for k, x in enumerate(t)) for t in st.tuples]
    second = rows[st.second]
    st.tuples = list(dict.fromkeys(rows))
    st.second = st.tuples.index(second)


def _step(st: ChaseState, order: list[Dependency]) -> TraceEntry | None:
    for n, d in enumerate(order):
        if isinstance(d, EMVD):
            hit = _emvd_violation(st, d)
            if hit:
                new = _emvd_tuple(st, d, *hit)
                st.tuples.append(new)
                return TraceEntry(d, n, hit, new=new)
        else:
            hit = _fd_violation(st, d)
            if hit:
                merges = _fd_merges(st, d, *hit)
                _apply_merges(st, merges)
                return TraceEntry(d, n, hit, merges=merges)
    return None


def _schema_of(sigma: Iterable[Dependency], tau: Dependency) -> tuple:
    vs = set(tau.variables())
    for d in sigma:
        vs |= d.variables()
    return tuple(sorted(vs))


def chase_emvd(sigma: Sequence[Dependency], tau: Dependency, max_steps: int | None = None,
               schema: Sequence[str] | None = None) -> ChaseResult:
    """Run the chase; ``max_steps`` defaults to $SEMIRING_CI_MAX_STEPS or 10000."""
    if max_steps is None:
        max_steps = default_max_steps()
    sigma = list(sigma)
    V = tuple(schema) if schema is not None else _schema_of(sigma, tau)
    Vset = frozenset(V)
    tau = _as_emvd(tau, Vset)
    if not isinstance(tau, EMVD):
        raise PreconditionError("the goal must be an EMVD (or an MVD/CI)")
    for d in [*sigma, tau]:
        if not d.variables() <= Vset:
            raise PreconditionError(f"{d} leaves the schema {V}")
    order = _order(sigma, Vset)
    st = initial_state(V, tau)
    start = copy.deepcopy(st)
    if tau.y <= tau.x or tau.z <= tau.x | tau.y:
        return ChaseResult(Outcome.YES, st, 0, start)
    steps = 0
    while True:
        if _goal_reached(st, tau):
            return ChaseResult(Outcome.YES, st, steps, start)
        if steps >= max_steps:
            return ChaseResult(Outcome.UNKNOWN, st, steps, start)
        entry = _step(st, order)
        if entry is None:
            return ChaseResult(Outcome.NO, st, steps, start)
        st.trace.append(entry)
        steps += 1


def replay_trace(state0: ChaseState, trace: Sequence[TraceEntry]) -> ChaseState:
    """Re-execute a trace from ``state0`` and check every step reproduces."""
    st = copy.deepcopy(state0)
    st.trace = list(st.trace)
    for k, e in enumerate(trace, start=1):
        i, j = e.pair
        n = len(st.tuples)
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise IntegrityError(f"step {k}: tuple positions {e.pair} invalid for {n} tuples")
        t, s = st.tuples[i], st.tuples[j]
        ix = _cols(st.schema, e.dependency.x)
        if any(t[c] != s[c] for c in ix):
            raise IntegrityError(f"step {k}: tuples {e.pair} disagree on {sorted(e.dependency.x)}")
        if isinstance(e.dependency, EMVD):
            new = _emvd_tuple(st, e.dependency, i, j)
            if new != e.new or new in st.tuples:
                raise IntegrityError(f"step {k}: expected new tuple {e.new}, replay gives {new}")
            st.tuples.append(new)
        elif isinstance(e.dependency, FD):
            merges = _fd_merges(st, e.dependency, i, j)
            if merges != e.merges or not merges:
                raise IntegrityError(f"step {k}: merges {e.merges} do not replay ({merges})")
            _apply_merges(st, merges)
        else:
            raise IntegrityError(f"step {k}: unexpected dependency {e.dependency}")
        st.trace.append(e)
    return st
