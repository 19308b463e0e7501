"""Command-line adapter: parse files and flags, call the library, print JSON.

Exit codes: 0 holds / valid, 1 fails (a witness is printed), 2 unknown,
3 usage or capability error.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .chase import chase_emvd
from .decompose import is_lossless, normalize_4nf, reconstruct
from .dependency import (dependency_from_json, dependency_to_json, find_violation,
                         parse_dependencies)
from .errors import SemiringCIError
from .implication import RuleError, derive_scifd, implies_scifd, two_tuple_relation
from .info import entropic_vector, entropy
from .proofs import (check_copy_extension, check_dependency_proof, check_entropic_proof,
                     copy_extend, is_entropic, load_proof)
from .relation import KRelation, Outcome, as_schema, equivalent, format_tsv, read_tsv, write_tsv
from .semiring import ALL_SEMIRINGS, INF, check_semiring_laws, default_samples, get_semiring

EXIT_OK, EXIT_FAIL, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 3
_EXIT = {Outcome.YES: EXIT_OK, Outcome.NO: EXIT_FAIL, Outcome.UNKNOWN: EXIT_UNKNOWN}
_LOSSLESS = {Outcome.YES: "Lossless", Outcome.NO: "NotLossless", Outcome.UNKNOWN: "Unknown"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- output ----------------------------------------------------------------------

def _plain(o: Any):
    if isinstance(o, Fraction):
        return str(o.numerator) if o.denominator == 1 else f"{o.numerator}/{o.denominator}"
    if o is INF:
        return "inf"
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    raise TypeError(f"cannot serialize {o!r}")


def dumps(obj: Any, pretty: bool = False) -> str:
    """Canonical JSON: sorted keys, compact separators unless ``pretty``."""
    if pretty:
        return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, default=_plain)
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False,
                      default=_plain)


def _fmt_witness(K, w: dict | None):
    if w is None:
        return None
    out = dict(w)
    for k in ("lhs", "rhs"):
        if k in out:
            out[k] = K.format(out[k])
    return out


# -- input -----------------------------------------------------------------------

def _data_dir():
    return resources.files("semiring_ci") / "data"


def resolve(path: str) -> Path:
    """A path on disk, falling back to the bundled fixtures by file name."""
    p = Path(path)
    if p.exists():
        return p
    bundled = _data_dir() / path
    if bundled.is_file():
        return Path(str(bundled))
    raise UsageError(f"no such file: {path}")


def _load_relation(args) -> KRelation:
    return read_tsv(resolve(args.rel), args.semiring)


def _deps_arg(text: str) -> list:
    """Inline JSON object, or a .json / .jsonl file."""
    if text.lstrip().startswith("{"):
        return [dependency_from_json(text)]
    raw = resolve(text).read_text(encoding="utf-8")
    stripped = raw.strip()
    if stripped.startswith("{") and "\n" not in stripped:
        return [dependency_from_json(stripped)]
    try:
        return [dependency_from_json(json.loads(raw))]
    except (json.JSONDecodeError, SemiringCIError):
        return parse_dependencies(raw)


def _one_dep(text: str):
    deps = _deps_arg(text)
    if len(deps) != 1:
        raise UsageError(f"expected one dependency, found {len(deps)}")
    return deps[0]


# -- subcommands -----------------------------------------------------------------

def cmd_check(args, out) -> int:
    R = _load_relation(args)
    deps = [d for text in args.dep or [] for d in _deps_arg(text)]
    if args.sigma:
        deps += _deps_arg(args.sigma)
    if not deps:
        raise UsageError("check needs --dep or --sigma")
    code = EXIT_OK
    for d in deps:
        w = find_violation(R, d, allow_nonpositive=args.allow_nonpositive)
        rec = {"dependency": dependency_to_json(d), "holds": w is None}
        if w is not None:
            rec["witness"] = _fmt_witness(R.semiring, w)
            code = EXIT_FAIL
        out(rec)
    return code


def cmd_decompose(args, out) -> int:
    R = _load_relation(args)
    if args.sigma:
        plan = normalize_4nf(R.schema, _deps_arg(args.sigma))
        J = reconstruct(R, plan)
        eq = equivalent(J, R)
        rec = plan.to_json()
        rec["rejoined"] = _LOSSLESS[eq.outcome]
        if eq.outcome is Outcome.YES:
            rec.update(a=R.semiring.format(eq.a), b=R.semiring.format(eq.b))
        out(rec)
        return _EXIT[eq.outcome]
    if not (args.left and args.right):
        raise UsageError("decompose needs --left and --right, or --sigma")
    res = is_lossless(R, as_schema(args.left), as_schema(args.right))
    K = R.semiring
    rec = {"left": list(as_schema(args.left)), "right": list(as_schema(args.right)),
           "lossless": _LOSSLESS[res.outcome]}
    if res.outcome is Outcome.YES:
        rec.update(a=K.format(res.a), b=K.format(res.b))
    out(rec)
    return _EXIT[res.outcome]


def cmd_normalize(args, out) -> int:
    plan = normalize_4nf(as_schema(args.schema), _deps_arg(args.sigma))
    out(plan.to_json())
    return EXIT_OK


def cmd_implies(args, out) -> int:
    V = as_schema(args.schema)
    sigma = _deps_arg(args.sigma) if args.sigma else []
    tau = _one_dep(args.tau)
    res = implies_scifd(V, sigma, tau)
    rec: dict = {"tau": dependency_to_json(tau), "implied": res.holds}
    if res.holds:
        steps = derive_scifd(V, sigma, tau) if args.proof else None
        if steps is not None:
            rec["proof"] = [{"formula": dependency_to_json(s.formula), "rule": s.rule,
                             "prem": list(s.premises), "inst": s.inst} for s in steps]
    else:
        agree = sorted(res.counterexample)
        R = two_tuple_relation(V, agree)
        rec["counterexample"] = {"agree": agree, "tuples": [t for t, _ in R.as_dicts()]}
    out(rec)
    return EXIT_OK if res.holds else EXIT_FAIL


def cmd_chase(args, out) -> int:
    sigma = _deps_arg(args.sigma) if args.sigma else []
    tau = _one_dep(args.tau)
    schema = as_schema(args.schema) if args.schema else None
    res = chase_emvd(sigma, tau, max_steps=args.max_steps, schema=schema)
    out({"verdict": res.verdict, "steps": res.steps,
         "schema": list(res.state.schema),
         "tuples": [list(t) for t in res.state.tuples],
         "trace": [e.to_json() for e in res.state.trace]})
    return _EXIT[res.outcome]


def cmd_copy_extend(args, out) -> int:
    R = _load_relation(args)
    ext = copy_extend(R, as_schema(args.x), as_schema(args.y),
                      as_schema(args.fresh) if args.fresh else None)
    checks = check_copy_extension(R, ext)
    rec = {"schema": list(ext.relation.schema), "fresh": list(ext.fresh),
           "scale": R.semiring.format(ext.scale), "checks": checks}
    if args.out:
        write_tsv(ext.relation, args.out)
        rec["out"] = args.out
    else:
        rec["tsv"] = format_tsv(ext.relation)
    out(rec)
    return EXIT_OK if all(checks.values()) else EXIT_FAIL


def cmd_verify_proof(args, out) -> int:
    script = load_proof(resolve(args.proof))
    mode = args.mode
    if mode == "auto":
        mode = "entropic" if is_entropic(script) else "dependency"
    if mode == "entropic":
        res = check_entropic_proof(None, script)
    else:
        res = check_dependency_proof(None, None, script)
    rec = {"name": script.name, "mode": mode, "valid": res.ok, "steps": len(script.steps)}
    if not res.ok:
        rec.update(step=res.step, reason=res.reason)
        st = script.steps[res.step - 1] if res.step and res.step <= len(script.steps) else None
        if st is not None and st.label:
            rec["label"] = st.label
    out(rec)
    return EXIT_OK if res.ok else EXIT_FAIL


def cmd_entropy(args, out) -> int:
    R = _load_relation(args)
    if args.vector:
        out(entropic_vector(R).to_json())
    elif args.subset is not None:
        ys = as_schema(args.subset) if args.subset else ()
        out({"subset": list(ys), "entropy": entropy(R, ys)})
    else:
        raise UsageError("entropy needs --subset or --vector")
    return EXIT_OK


def cmd_laws(args, out) -> int:
    specs = ALL_SEMIRINGS if args.semiring == "all" else [get_semiring(args.semiring)]
    code = EXIT_OK
    for K in specs:
        if args.samples:
            samples = [K.parse(s) for s in _split_samples(args.samples)]
        else:
            samples = default_samples(K)
        rep = check_semiring_laws(K, samples)
        out({"semiring": K.tag, "ok": rep.ok, "flags": K.flags.as_dict(),
             "violations": rep.violations,
             "refuted": {k: [K.format(v) for v in w] for k, w in rep.refuted.items()}})
        if not rep.ok:
            code = EXIT_FAIL
    return code


def _split_samples(text: str) -> list[str]:
    # pairs contain commas, so split on ';' when present
    sep = ";" if ";" in text else ","
    return [s.strip() for s in text.split(sep) if s.strip()]


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="semiring-ci", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--pretty", action="store_true", help="indented JSON")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    # --pretty is accepted after the subcommand too
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--pretty", action="store_true", default=argparse.SUPPRESS,
                        help="indented JSON")
    add = sub.add_parser
    sub.add_parser = lambda *a, **kw: add(*a, parents=[common], **kw)

    def rel_opts(sp):
        sp.add_argument("--rel", required=True, help="TSV relation (path or bundled name)")
        sp.add_argument("--semiring", help="expected semiring tag; must match the header")

    sp = sub.add_parser("check", help="test dependencies on a relation")
    rel_opts(sp)
    sp.add_argument("--dep", action="append", help="inline JSON dependency or file")
    sp.add_argument("--sigma", help="JSONL file of dependencies")
    sp.add_argument("--allow-nonpositive", action="store_true",
                    help="evaluate even when the semiring is not plus-positive")
    sp.set_defaults(fn=cmd_check)

    sp = sub.add_parser("decompose", help="lossless-join test or plan-and-rejoin")
    rel_opts(sp)
    sp.add_argument("--left")
    sp.add_argument("--right")
    sp.add_argument("--sigma")
    sp.set_defaults(fn=cmd_decompose)

    sp = sub.add_parser("normalize", help="4NF decomposition plan")
    sp.add_argument("--schema", required=True)
    sp.add_argument("--sigma", required=True)
    sp.set_defaults(fn=cmd_normalize)

    sp = sub.add_parser("implies", help="SCI+FD implication")
    sp.add_argument("--schema", required=True)
    sp.add_argument("--sigma")
    sp.add_argument("--tau", required=True)
    sp.add_argument("--no-proof", dest="proof", action="store_false",
                    help="skip the derivation search")
    sp.set_defaults(fn=cmd_implies)

    sp = sub.add_parser("chase", help="EMVD implication by the chase")
    sp.add_argument("--sigma")
    sp.add_argument("--tau", required=True)
    sp.add_argument("--schema")
    sp.add_argument("--max-steps", type=int, default=None)
    sp.set_defaults(fn=cmd_chase)

    sp = sub.add_parser("copy-extend", help="add a conditionally independent copy")
    rel_opts(sp)
    sp.add_argument("--x", required=True)
    sp.add_argument("--y", required=True)
    sp.add_argument("--fresh")
    sp.add_argument("--out")
    sp.set_defaults(fn=cmd_copy_extend)

    sp = sub.add_parser("verify-proof", help="check a proof script")
    sp.add_argument("proof", help="JSON script (path or bundled name)")
    sp.add_argument("--mode", choices=["auto", "dependency", "entropic"], default="auto")
    sp.set_defaults(fn=cmd_verify_proof)

    sp = sub.add_parser("entropy", help="Shannon entropies of a probability relation")
    rel_opts(sp)
    sp.add_argument("--subset")
    sp.add_argument("--vector", action="store_true")
    sp.set_defaults(fn=cmd_entropy)

    sp = sub.add_parser("laws", help="check semiring axioms and capability flags")
    sp.add_argument("--semiring", default="all")
    sp.add_argument("--samples", help="comma- or semicolon-separated literals")
    sp.set_defaults(fn=cmd_laws)
    return p


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(dumps({"error": str(exc), "kind": "UsageError"}), file=stderr)
        return EXIT_USAGE

    def out(obj):
        print(dumps(obj, args.pretty), file=stdout)

    try:
        return args.fn(args, out)
    except (UsageError, SemiringCIError, RuleError, OSError) as exc:
        print(dumps({"error": str(exc), "kind": type(exc).__name__}), file=stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
