"""Copy-lemma extensions and checkers for dependency and entropic proof scripts.

A proof script is a numbered list of statements.  A statement is either a
dependency (CI, FD, MVD, EMVD, MID) or a linear inequality ``expr >= 0``
over joint entropies.  Each step names the rule that justifies it, the
earlier steps it uses (1-based) and, where needed, a certificate.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .decompose import _excl_table, c_star
from .dependency import (CI, MID, dependency_from_json,
                         dependency_to_json, satisfies_ci, satisfies_mid)
from .errors import CapabilityError, ParseError, SchemaError
from .implication import CheckResult, RuleError, check_rule_step
from .relation import KRelation, as_schema, equivalent

__all__ = [
    "EntropicExpr", "h", "expand_cmi", "Ineq", "ProofStep", "ProofScript",
    "CopyExtension", "copy_extend", "check_copy_extension",
    "check_dependency_proof", "check_entropic_proof", "check_proof",
    "certificate_expr", "load_proof", "proof_from_json", "proof_to_json",
    "statement_from_json", "statement_to_json", "is_entropic",
]


# -- entropic expressions ------------------------------------------------------------

class EntropicExpr:
    """A finite rational combination of joint-entropy coordinates h(S).

    The coordinate of the empty set is always dropped (it is zero on every
    polymatroid).  Supports +, -, scalar * and exact equality.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[Iterable[str], Any] | None = None):
        out: dict[frozenset, Fraction] = {}
        for s, c in (coeffs or {}).items():
            s = frozenset(s)
            if not s:
                continue
            q = out.get(s, Fraction(0)) + Fraction(c)
            if q:
                out[s] = q
            else:
                out.pop(s, None)
        self.coeffs = out

    @classmethod
    def h(cls, vars_: Iterable[str]) -> "EntropicExpr":
        return cls({frozenset(vars_): 1})

    def __add__(self, other: "EntropicExpr"):
        c = dict(self.coeffs)
        for s, q in other.coeffs.items():
            c[s] = c.get(s, Fraction(0)) + q
        return EntropicExpr(c)

    def __neg__(self):
        return EntropicExpr({s: -q for s, q in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, k):
        k = Fraction(k)
        return EntropicExpr({s: k * q for s, q in self.coeffs.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return isinstance(other, EntropicExpr) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __bool__(self):
        return bool(self.coeffs)

    def variables(self) -> frozenset:
        return frozenset().union(*self.coeffs) if self.coeffs else frozenset()

    def evaluate(self, values: Mapping[frozenset, float]) -> float:
        return sum(float(q) * values[s] for s, q in self.coeffs.items())

    def _terms(self):
        def key(s):
            return (len(s), sorted(s))
        return sorted(self.coeffs.items(), key=lambda kv: key(kv[0]))

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for s, q in self._terms():
            names = sorted(s)
            body = "".join(names) if all(len(n) <= 2 for n in names) else ",".join(names)
            mag = abs(q)
            coef = "" if mag == 1 else f"{mag}"
            parts.append(("-" if q < 0 else "+") + f"{coef}h({body})")
        out = "".join(parts)
        return out[1:] if out.startswith("+") else out


h = EntropicExpr.h


def expand_cmi(y: Iterable[str], z: Iterable[str], x: Iterable[str] = ()) -> EntropicExpr:
    """I(Y;Z|X) = h(XY) + h(XZ) - h(X) - h(XYZ)."""
    x, y, z = frozenset(x), frozenset(y), frozenset(z)
    return EntropicExpr({x | y: 1}) + EntropicExpr({x | z: 1}) - EntropicExpr({x: 1}) \
        - EntropicExpr({x | y | z: 1})


@dataclass(frozen=True)
class Ineq:
    """The claim ``expr >= 0``."""

    expr: EntropicExpr

    def variables(self) -> frozenset:
        return self.expr.variables()

    def __str__(self):
        return f"{self.expr!r} >= 0"


Statement = Any  # Dependency | Ineq


def _ci_ineq(d: CI) -> Ineq:
    return Ineq(-expand_cmi(d.y, d.z, d.x))


def certificate_expr(cert: Sequence[Mapping]) -> EntropicExpr:
    """Sum of Shannon-inequality instances with positive rational weights."""
    if not isinstance(cert, (list, tuple)) or not cert:
        raise RuleError("a polymatroid certificate is a non-empty list of instances")
    total = EntropicExpr()
    for k, inst in enumerate(cert, start=1):
        if not isinstance(inst, Mapping):
            raise RuleError(f"certificate instance {k} is not an object")
        c = _pos_rational(inst.get("c", 1), f"certificate instance {k}")
        kind = inst.get("kind")
        xs = frozenset(inst.get("x", []))
        ys = frozenset(inst.get("y", []))
        if kind == "cmi":
            e = expand_cmi(ys, inst.get("z", []), xs)
        elif kind == "mono":
            e = EntropicExpr({xs | ys: 1}) - EntropicExpr({xs: 1})
        elif kind == "submod":
            e = (EntropicExpr({xs: 1}) + EntropicExpr({ys: 1})
                 - EntropicExpr({xs & ys: 1}) - EntropicExpr({xs | ys: 1}))
        else:
            raise RuleError(f"certificate instance {k}: unknown kind {kind!r}")
        total = total + c * e
    return total


def _pos_rational(v, what: str) -> Fraction:
    try:
        q = Fraction(v) if not isinstance(v, float) else None
    except (ValueError, ZeroDivisionError, TypeError):
        q = None
    if q is None:
        raise RuleError(f"{what}: coefficient {v!r} is not an exact rational")
    if q <= 0:
        raise RuleError(f"{what}: coefficient {v} is not positive")
    return q


# -- scripts ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProofStep:
    stmt: Statement
    rule: str
    prem: tuple = ()
    cert: Any = None
    label: str | None = None


@dataclass
class ProofScript:
    universe: tuple
    premises: list
    steps: list
    goal: Statement | None = None
    name: str | None = None


_ENTROPIC_RULES = {"polymatroid", "interaction", "scale", "add", "rewrite", "ci2ineq"}


def _stmt_vars(s) -> frozenset:
    return s.variables()


def _copy_pair(cert) -> tuple[frozenset, tuple, tuple]:
    if not isinstance(cert, Mapping):
        raise RuleError("a copy step needs a certificate {x, y, fresh}")
    x = frozenset(cert.get("x", []))
    y = tuple(cert.get("y", []))
    fresh = tuple(cert.get("fresh", []))
    if not y:
        raise RuleError("copy needs a non-empty y")
    if len(fresh) != len(y) or len(set(fresh)) != len(fresh) or len(set(y)) != len(y):
        raise RuleError("fresh copy must list distinct variables, one per copied variable")
    if x & set(y):
        raise RuleError("copy needs x and y disjoint")
    if set(fresh) & (x | set(y)):
        raise RuleError("fresh variables overlap the copied block")
    return x, y, fresh


def _copy_statements(x, y, fresh, entropic: bool):
    ci = CI(x, frozenset(y), frozenset(fresh))
    forms = {ci}
    if entropic:
        forms.add(_ci_ineq(ci))
    return forms


def _copy_mid_ok(stmt, x, y, fresh) -> bool:
    if not isinstance(stmt, MID):
        return False
    want = {(v, v) for v in x} | set(zip(y, fresh))
    got = list(zip(stmt.x, stmt.y))
    return len(got) == len(want) and set(got) == want


def check_proof(script: ProofScript, *, entropic: bool) -> CheckResult:
    """Shared checker; ``entropic`` enables inequality statements and rules."""
    universe = frozenset(script.universe)
    seen_vars: set = set()
    for p in script.premises:
        seen_vars |= _stmt_vars(p)
    existential: set = set()
    done: list = []
    steps = script.steps
    pending_copy: tuple | None = None  # (step number, x, y, fresh, kinds seen)
    if not steps:
        return CheckResult(False, 0, "empty proof")

    for n, st in enumerate(steps, start=1):
        try:
            rule = st.rule.lower()
            if universe and not _stmt_vars(st.stmt) <= universe:
                raise RuleError(f"statement mentions {sorted(_stmt_vars(st.stmt) - universe)} "
                                "outside the universe")
            if isinstance(st.stmt, Ineq) and not entropic:
                raise RuleError("inequality statements are not allowed in a dependency proof")
            bad = [p for p in st.prem if not (isinstance(p, int) and 1 <= p < n)]
            if bad:
                raise RuleError(f"premise reference(s) {bad} do not point to earlier steps")
            prem = [done[p - 1] for p in st.prem]

            if pending_copy is not None and rule != "copy":
                raise RuleError(f"copy step {pending_copy[0]} must be followed by its partner")

            if rule == "premise":
                if st.prem:
                    raise RuleError("a premise step cites no steps")
                if st.stmt not in script.premises:
                    raise RuleError(f"{st.stmt} is not among the premises")
            elif rule == "copy":
                x, y, fresh = _copy_pair(st.cert)
                if pending_copy is None:
                    clash = set(fresh) & seen_vars
                    if clash:
                        raise RuleError(f"copy variables {sorted(clash)} are not fresh")
                    if universe and not set(fresh) <= universe:
                        raise RuleError("fresh variables must be declared in the universe")
                    if not (x | set(y)) <= universe | seen_vars:
                        raise RuleError("copied block uses unknown variables")
                    first = st.stmt
                    if not (first in _copy_statements(x, y, fresh, entropic)
                            or _copy_mid_ok(first, x, y, fresh)):
                        raise RuleError(f"{first} is not one of the two copy-lemma statements")
                    pending_copy = (n, x, y, fresh, first)
                else:
                    n0, x0, y0, f0, first = pending_copy
                    if (x, y, fresh) != (x0, y0, f0):
                        raise RuleError(f"copy partner of step {n0} uses a different block")
                    is_mid = _copy_mid_ok(st.stmt, x, y, fresh)
                    is_ci = st.stmt in _copy_statements(x, y, fresh, entropic)
                    first_mid = _copy_mid_ok(first, x, y, fresh)
                    if not ((is_mid and not first_mid) or (is_ci and first_mid)):
                        raise RuleError("the copy pair needs one CI and one marginal identity")
                    existential |= set(fresh)
                    pending_copy = None
            elif rule in _ENTROPIC_RULES:
                if not entropic:
                    raise RuleError(f"rule {st.rule} needs an entropic proof")
                _check_entropic_rule(rule, st, prem)
            else:
                if not isinstance(st.cert, (Mapping, type(None))):
                    raise RuleError("rule bindings must be an object")
                check_rule_step(st.rule, dict(st.cert or {}), prem, st.stmt,
                                universe or None)
        except (RuleError, SchemaError) as exc:
            return CheckResult(False, n, str(exc))
        done.append(st.stmt)
        seen_vars |= _stmt_vars(st.stmt)
        if st.rule.lower() == "copy":
            seen_vars |= set(st.cert.get("fresh", []))

    last = len(steps)
    if pending_copy is not None:
        return CheckResult(False, last, "copy step without its partner")
    final = steps[-1].stmt
    leak = _stmt_vars(final) & existential
    if leak:
        return CheckResult(False, last, f"final statement mentions existential {sorted(leak)}")
    if script.goal is not None and final != script.goal:
        return CheckResult(False, last, f"final statement {final} differs from the goal {script.goal}")
    return CheckResult(True)


def _as_ineq(s, n_what: str) -> EntropicExpr:
    if not isinstance(s, Ineq):
        raise RuleError(f"{n_what} must be an inequality")
    return s.expr


def _check_entropic_rule(rule: str, st: ProofStep, prem: list) -> None:
    target = _as_ineq(st.stmt, "the statement")
    if rule == "polymatroid":
        if prem:
            raise RuleError("a polymatroid certificate cites no steps")
        got = certificate_expr(st.cert)
        if got != target:
            raise RuleError(f"certificate sums to {got!r}, statement is {target!r}")
        return
    if rule == "add":
        if not prem:
            raise RuleError("add needs at least one premise")
        ws = (st.cert or {}).get("c") if isinstance(st.cert, Mapping) else st.cert
        ws = [1] * len(prem) if ws is None else ws
        if not isinstance(ws, list) or len(ws) != len(prem):
            raise RuleError("add weights must match the premises")
        total = EntropicExpr()
        for k, (p, w) in enumerate(zip(prem, ws), start=1):
            total = total + _pos_rational(w, f"weight {k}") * _as_ineq(p, f"premise {k}")
        if total != target:
            raise RuleError(f"premises combine to {total!r}, statement is {target!r}")
        return
    if len(prem) != 1:
        raise RuleError(f"{rule} takes exactly one premise")
    p = prem[0]
    if rule == "scale":
        c = _pos_rational((st.cert or {}).get("c") if isinstance(st.cert, Mapping) else st.cert,
                          "scale factor")
        if c * _as_ineq(p, "the premise") != target:
            raise RuleError(f"{c} times the premise is not the statement")
    elif rule == "rewrite":
        if _as_ineq(p, "the premise") != target:
            raise RuleError("rewrite changes the coordinate vector")
    elif rule == "interaction":
        if not isinstance(p, MID):
            raise RuleError("interaction needs a marginal identity")
        if h(p.x) - h(p.y) != target:
            raise RuleError(f"interaction of {p} gives h({list(p.x)}) - h({list(p.y)})")
    elif rule == "ci2ineq":
        if not isinstance(p, CI):
            raise RuleError("ci2ineq needs a CI premise")
        if _ci_ineq(p).expr != target:
            raise RuleError(f"{p} corresponds to {_ci_ineq(p)}")


def check_dependency_proof(V, sigma, script: ProofScript) -> CheckResult:
    """Dependency statements only; ``V`` and ``sigma`` override the script's own."""
    if V is not None:
        script = ProofScript(tuple(V), list(script.premises if sigma is None else sigma),
                             script.steps, script.goal, script.name)
    elif sigma is not None:
        script = ProofScript(script.universe, list(sigma), script.steps, script.goal, script.name)
    for p in script.premises:
        if isinstance(p, Ineq):
            return CheckResult(False, 0, "inequality premise in a dependency proof")
    return check_proof(script, entropic=False)


def check_entropic_proof(vars_, script: ProofScript) -> CheckResult:
    if vars_ is not None:
        script = ProofScript(tuple(vars_), script.premises, script.steps, script.goal, script.name)
    return check_proof(script, entropic=True)


# -- copy lemma on K-relations ----------------------------------------------------------

@dataclass(frozen=True)
class CopyExtension:
    relation: KRelation
    x: tuple
    y: tuple
    fresh: tuple
    scale: Any   # c_star(R, x): R'[XY] equals R scaled by this


def _fresh_names(y: Sequence[str], taken: set) -> tuple:
    out = []
    for v in y:
        name = v + "'"
        while name in taken or name in out:
            name += "'"
        out.append(name)
    return tuple(out)


def copy_extend(R: KRelation, x: Iterable[str], y: Iterable[str],
                fresh: Sequence[str] | None = None) -> CopyExtension:
    """Extend R(XY) to R'(XYY') with Y' a conditionally independent copy of Y."""
    K = R.semiring
    if not K.flags.no_zero_divisors:
        raise CapabilityError(f"{K.tag} has zero divisors; the copy construction needs none")
    x = tuple(v for v in R.schema if v in set(x))
    y = as_schema(list(y))
    if set(x) & set(y) or set(x) | set(y) != set(R.schema) or len(x) + len(y) != len(R.schema):
        raise SchemaError(f"x={x} and y={y} must partition the schema {R.schema}")
    fresh = _fresh_names(y, set(R.schema)) if fresh is None else as_schema(list(fresh))
    if len(fresh) != len(y) or set(fresh) & set(R.schema):
        raise SchemaError(f"fresh names {fresh} clash with {R.schema} or have the wrong length")
    xi = [R.schema.index(v) for v in x]
    yi = [R.schema.index(v) for v in y]
    ocols, table, total = _excl_table(R, x)
    assert ocols == x
    groups: dict = {}
    for t, v in R.items():
        groups.setdefault(tuple(t[i] for i in xi), []).append((t, v))
    out = {}
    for u, rows in groups.items():
        c = table.get(u, total)
        for t, a in rows:
            for s, b in rows:
                val = K._mul(K._mul(a, b), c)
                if val != K.zero:
                    out[t + tuple(s[i] for i in yi)] = val
    ext = KRelation(R.schema + fresh, K, out, _trusted=True)
    return CopyExtension(ext, x, y, fresh, c_star(R, x))


def check_copy_extension(R: KRelation, ext: CopyExtension) -> dict[str, bool]:
    """Evaluate the three guarantees of the construction."""
    Rp = ext.relation
    back = Rp.marginal(R.schema)
    return {
        "marginal": back == R.scale(ext.scale) and bool(equivalent(back, R)),
        "ci": satisfies_ci(Rp, CI(ext.x, ext.y, ext.fresh)),
        "mid": satisfies_mid(Rp, MID(ext.x + ext.y, ext.x + ext.fresh)),
    }


# -- JSON ----------------------------------------------------------------------------------

def _q(s) -> str:
    q = Fraction(s)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def statement_from_json(obj) -> Statement:
    if isinstance(obj, Mapping) and "ineq" in obj and len(obj) == 1:
        terms = obj["ineq"]
        if not isinstance(terms, list):
            raise ParseError("ineq must be a list of terms")
        e = EntropicExpr()
        for t in terms:
            if not isinstance(t, Mapping) or "c" not in t:
                raise ParseError(f"bad inequality term {t!r}")
            try:
                c = Fraction(str(t["c"]))
            except (ValueError, ZeroDivisionError):
                raise ParseError(f"bad coefficient {t['c']!r}") from None
            if "h" in t:
                e = e + c * h(t["h"])
            elif "I" in t and isinstance(t["I"], list) and len(t["I"]) in (2, 3):
                parts = list(t["I"]) + ([[]] if len(t["I"]) == 2 else [])
                e = e + c * expand_cmi(parts[0], parts[1], parts[2])
            else:
                raise ParseError(f"term needs 'h' or 'I': {t!r}")
        return Ineq(e)
    return dependency_from_json(obj)


def statement_to_json(s: Statement) -> dict:
    if isinstance(s, Ineq):
        return {"ineq": [{"c": _q(q), "h": sorted(S)} for S, q in s.expr._terms()]}
    return dependency_to_json(s)


def proof_from_json(obj) -> ProofScript:
    if isinstance(obj, (str, bytes)):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid proof JSON: {exc}") from None
    if not isinstance(obj, Mapping) or "steps" not in obj:
        raise ParseError("a proof is an object with 'steps'")
    steps = []
    for k, s in enumerate(obj["steps"], start=1):
        if not isinstance(s, Mapping) or "stmt" not in s or "rule" not in s:
            raise ParseError(f"step {k} needs 'stmt' and 'rule'")
        try:
            stmt = statement_from_json(s["stmt"])
        except (ParseError, SchemaError) as exc:
            raise ParseError(f"step {k}: {exc}") from None
        prem = s.get("prem", [])
        if not isinstance(prem, list):
            raise ParseError(f"step {k}: 'prem' must be a list")
        steps.append(ProofStep(stmt, str(s["rule"]), tuple(prem), s.get("cert"), s.get("label")))
    premises = [statement_from_json(p) for p in obj.get("premises", [])]
    goal = statement_from_json(obj["goal"]) if obj.get("goal") is not None else None
    return ProofScript(tuple(obj.get("universe", [])), premises, steps, goal, obj.get("name"))


def proof_to_json(p: ProofScript) -> dict:
    out: dict = {"universe": list(p.universe),
                 "premises": [statement_to_json(s) for s in p.premises],
                 "steps": []}
    if p.name:
        out["name"] = p.name
    if p.goal is not None:
        out["goal"] = statement_to_json(p.goal)
    for st in p.steps:
        d = {"stmt": statement_to_json(st.stmt), "rule": st.rule, "prem": list(st.prem)}
        if st.cert is not None:
            d["cert"] = st.cert
        if st.label:
            d["label"] = st.label
        out["steps"].append(d)
    return out


def load_proof(path: str | Path) -> ProofScript:
    return proof_from_json(Path(path).read_text(encoding="utf-8"))


def is_entropic(p: ProofScript) -> bool:
    stmts = [*p.premises, *(s.stmt for s in p.steps)] + ([p.goal] if p.goal is not None else [])
    return any(isinstance(s, Ineq) for s in stmts) or any(
        s.rule.lower() in _ENTROPIC_RULES for s in p.steps)
