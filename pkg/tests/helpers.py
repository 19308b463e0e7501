"""Enumeration utilities shared by the property and acceptance suites."""
from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path

from semiring_ci import (BOOLEAN, CI, FD, NATURALS, NONNEG_RATIONALS, TROPICAL, KRelation)

# three non-zero annotations per semiring (Boolean has only one)
SAMPLES = {
    BOOLEAN: [True],
    NATURALS: [1, 2, 3],
    NONNEG_RATIONALS: [Fraction(1, 2), Fraction(1), Fraction(3)],
    TROPICAL: [Fraction(0), Fraction(1), Fraction(5)],
}
POSITIVE_CANCELLATIVE = list(SAMPLES)

# findings printed in the terminal summary (see conftest)
NOTES: list[str] = []


def data_path(name: str) -> Path:
    return Path(str(resources.files("semiring_ci") / "data" / name))


def schemas(max_vars: int = 3):
    names = "ABC"[:max_vars]
    return [tuple(names[:n]) for n in range(1, max_vars + 1)]


@lru_cache(maxsize=None)
def domain_tuples(n: int, size: int = 2) -> tuple:
    return tuple(itertools.product([str(i) for i in range(size)], repeat=n))


def enumerate_relations(K, schema, max_support: int, samples, domain: int = 2):
    """Every K-relation over ``schema`` with at most ``max_support`` tuples."""
    tuples = domain_tuples(len(schema), domain)
    for k in range(1, max_support + 1):
        for supp in itertools.combinations(tuples, k):
            for vals in itertools.product(samples, repeat=k):
                yield KRelation(schema, K, dict(zip(supp, vals)))


def total_relations(K, schema, samples, domain: int = 2):
    tuples = domain_tuples(len(schema), domain)
    for vals in itertools.product(samples, repeat=len(tuples)):
        yield KRelation(schema, K, dict(zip(tuples, vals)))


def subsets(vs):
    vs = tuple(vs)
    return [frozenset(c) for r in range(len(vs) + 1) for c in itertools.combinations(vs, r)]


def labelings(vs, labels: str):
    """Assignments of each variable to one of ``labels`` or to nothing ('-')."""
    for lab in itertools.product(labels + "-", repeat=len(vs)):
        yield {c: frozenset(v for v, l in zip(vs, lab) if l == c) for c in labels}


def all_cis(vs):
    """CIs with non-empty y and z (empty sides are trivially satisfied)."""
    out = []
    for part in labelings(vs, "xyz"):
        if part["y"] and part["z"]:
            out.append(CI(part["x"], part["y"], part["z"]))
    return out


def all_fds(vs):
    return [FD(x, y) for x in subsets(vs) for y in subsets(vs) if y]
