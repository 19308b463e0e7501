"""Commutative semirings with exact arithmetic.

Every instance is a singleton object exposing ``zero``, ``one``, ``add``,
``mul`` and a set of capability flags.  Carriers never contain floats:
rationals are :class:`fractions.Fraction`, naturals are ``int`` and the
tropical infinity is the sentinel :data:`INF`.
"""
from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable

from .errors import CapabilityError, CarrierError, ParseError

__all__ = [
    "INF", "Kind", "Flags", "Semiring", "LawReport",
    "BOOLEAN", "NATURALS", "NONNEG_RATIONALS", "TROPICAL", "VITERBI",
    "LUKASIEWICZ", "PAIRNZ2", "MOD2", "ALL_SEMIRINGS",
    "get_semiring", "check_semiring_laws", "default_samples",
]


class _Infinity:
    """Positive infinity for the tropical carrier.  Larger than every rational."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Infinity, ())

    def __hash__(self):
        return hash("semiring_ci.INF")

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


INF = _Infinity()


class Kind(enum.Enum):
    BOOLEAN = "bool"
    NATURALS = "nat"
    NONNEG_RATIONALS = "qnn"
    TROPICAL = "tropical"
    VITERBI = "viterbi"
    LUKASIEWICZ = "lukasiewicz"
    PAIRNZ2 = "pairnz2"
    MOD2 = "mod2"


@dataclass(frozen=True)
class Flags:
    plus_positive: bool
    no_zero_divisors: bool
    mult_cancellative: bool
    add_cancellative: bool
    add_idempotent: bool
    naturally_totally_ordered: bool

    @property
    def positive(self) -> bool:
        return self.plus_positive and self.no_zero_divisors

    def as_dict(self) -> dict[str, bool]:
        return {
            "plus_positive": self.plus_positive,
            "no_zero_divisors": self.no_zero_divisors,
            "mult_cancellative": self.mult_cancellative,
            "add_cancellative": self.add_cancellative,
            "add_idempotent": self.add_idempotent,
            "naturally_totally_ordered": self.naturally_totally_ordered,
        }


def _parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not re.fullmatch(r"[+-]?\d+(/\d+)?", text):
        raise ParseError(f"not a rational literal: {text!r}")
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise ParseError(f"zero denominator in {text!r}") from None


def _format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _as_fraction(v: Any) -> Fraction | None:
    if isinstance(v, bool):
        return None
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, Fraction):
        return v
    return None


class Semiring:
    """Base class.  Subclasses implement ``_add``/``_mul`` on canonical values.

    The public ``add``/``mul`` validate their arguments; the underscored
    versions skip validation and are what the relational code uses in
    inner loops once values have been coerced at construction time.
    """

    kind: Kind
    flags: Flags
    zero: Any
    one: Any

    @property
    def tag(self) -> str:
        return self.kind.value

    @property
    def positive(self) -> bool:
        return self.flags.positive

    def __repr__(self):
        return f"<semiring {self.tag}>"

    def __reduce__(self):
        return (get_semiring, (self.tag,))

    # -- carrier ---------------------------------------------------------
    def coerce(self, v: Any):
        """Return the canonical representative of ``v`` or raise CarrierError."""
        raise NotImplementedError

    def contains(self, v: Any) -> bool:
        try:
            self.coerce(v)
        except CarrierError:
            return False
        return True

    def parse(self, text: str):
        raise NotImplementedError

    def format(self, v) -> str:
        raise NotImplementedError

    # -- operations --------------------------------------------------------
    def _add(self, a, b):
        raise NotImplementedError

    def _mul(self, a, b):
        raise NotImplementedError

    def add(self, a, b):
        return self._add(self.coerce(a), self.coerce(b))

    def mul(self, a, b):
        return self._mul(self.coerce(a), self.coerce(b))

    def sum(self, values: Iterable):
        acc = self.zero
        for v in values:
            acc = self._add(acc, v)
        return acc

    def prod(self, values: Iterable):
        acc = self.one
        for v in values:
            acc = self._mul(acc, v)
        return acc

    def is_zero(self, v) -> bool:
        return v == self.zero

    def natural_leq(self, a, b) -> bool:
        """Decide whether some c satisfies a + c = b."""
        if not self.flags.naturally_totally_ordered:
            raise CapabilityError(f"{self.tag} is not naturally totally ordered")
        return self._natural_leq(self.coerce(a), self.coerce(b))

    def _natural_leq(self, a, b) -> bool:
        raise NotImplementedError


class _Boolean(Semiring):
    kind = Kind.BOOLEAN
    flags = Flags(True, True, True, False, True, True)
    zero = False
    one = True

    def coerce(self, v):
        if isinstance(v, bool):
            return v
        if isinstance(v, int) and v in (0, 1):
            return bool(v)
        raise CarrierError(f"{v!r} is not a Boolean value")

    def parse(self, text):
        t = text.strip().lower()
        if t in ("1", "true"):
            return True
        if t in ("0", "false"):
            return False
        raise ParseError(f"not a Boolean literal: {text!r}")

    def format(self, v):
        return "1" if v else "0"

    def _add(self, a, b):
        return a or b

    def _mul(self, a, b):
        return a and b

    def _natural_leq(self, a, b):
        return a <= b


class _Naturals(Semiring):
    kind = Kind.NATURALS
    flags = Flags(True, True, True, True, False, True)
    zero = 0
    one = 1

    def coerce(self, v):
        if isinstance(v, Fraction) and v.denominator == 1:
            v = v.numerator
        if isinstance(v, int) and not isinstance(v, bool) and v >= 0:
            return v
        raise CarrierError(f"{v!r} is not a natural number")

    def parse(self, text):
        q = _parse_rational(text)
        if q.denominator != 1 or q < 0:
            raise ParseError(f"not a natural number: {text!r}")
        return q.numerator

    def format(self, v):
        return str(v)

    def _add(self, a, b):
        return a + b

    def _mul(self, a, b):
        return a * b

    def _natural_leq(self, a, b):
        return a <= b


class _NonNegRationals(Semiring):
    kind = Kind.NONNEG_RATIONALS
    flags = Flags(True, True, True, True, False, True)
    zero = Fraction(0)
    one = Fraction(1)

    def coerce(self, v):
        q = _as_fraction(v)
        if q is None or q < 0:
            raise CarrierError(f"{v!r} is not a non-negative rational")
        return q

    def parse(self, text):
        q = _parse_rational(text)
        if q < 0:
            raise ParseError(f"negative literal {text!r}")
        return q

    def format(self, v):
        return _format_rational(v)

    def _add(self, a, b):
        return a + b

    def _mul(self, a, b):
        return a * b

    def _natural_leq(self, a, b):
        return a <= b


class _Tropical(Semiring):
    """min-plus over the rationals with +infinity as zero."""

    kind = Kind.TROPICAL
    flags = Flags(True, True, True, False, True, True)
    zero = INF
    one = Fraction(0)

    def coerce(self, v):
        if v is INF:
            return v
        if isinstance(v, float) and v == float("inf"):
            return INF
        q = _as_fraction(v)
        if q is None:
            raise CarrierError(f"{v!r} is not a tropical value")
        return q

    def parse(self, text):
        t = text.strip().lower()
        if t in ("inf", "+inf", "infinity"):
            return INF
        return _parse_rational(t)

    def format(self, v):
        return "inf" if v is INF else _format_rational(v)

    def _add(self, a, b):
        return b if b < a else a

    def _mul(self, a, b):
        if a is INF or b is INF:
            return INF
        return a + b

    def _natural_leq(self, a, b):
        # min(a, c) = b is solvable exactly when b <= a numerically
        return b <= a


class _UnitInterval(Semiring):
    zero = Fraction(0)
    one = Fraction(1)

    def coerce(self, v):
        q = _as_fraction(v)
        if q is None or not 0 <= q <= 1:
            raise CarrierError(f"{v!r} is not a rational in [0,1]")
        return q

    def parse(self, text):
        q = _parse_rational(text)
        if not 0 <= q <= 1:
            raise ParseError(f"{text!r} is outside [0,1]")
        return q

    def format(self, v):
        return _format_rational(v)

    def _add(self, a, b):
        return a if a >= b else b

    def _natural_leq(self, a, b):
        return a <= b


class _Viterbi(_UnitInterval):
    kind = Kind.VITERBI
    flags = Flags(True, True, True, False, True, True)

    def _mul(self, a, b):
        return a * b


class _Lukasiewicz(_UnitInterval):
    kind = Kind.LUKASIEWICZ
    flags = Flags(True, False, False, False, True, True)

    def _mul(self, a, b):
        s = a + b - 1
        return s if s > 0 else self.zero


class _PairNZ2(Semiring):
    """Pairs (n, b) with n > 0 and b a bit, plus the zero (0, 0); pointwise operations."""

    kind = Kind.PAIRNZ2
    flags = Flags(True, True, False, True, False, False)
    zero = (0, 0)
    one = (1, 1)

    def coerce(self, v):
        if (isinstance(v, tuple) and len(v) == 2
                and all(isinstance(x, int) and not isinstance(x, bool) for x in v)):
            n, b = v
            if n >= 0 and b in (0, 1) and (n > 0 or b == 0):
                return (n, b)
        raise CarrierError(f"{v!r} is not a PairNZ2 value")

    def parse(self, text):
        m = re.fullmatch(r"\(\s*(\d+)\s*,\s*(\d+)\s*\)", text.strip())
        if not m:
            raise ParseError(f"not a pair literal: {text!r}")
        try:
            return self.coerce((int(m.group(1)), int(m.group(2))))
        except CarrierError as exc:
            raise ParseError(str(exc)) from None

    def format(self, v):
        return f"({v[0]},{v[1]})"

    @staticmethod
    def _norm(n, b):
        return (n, b) if n else (0, 0)

    def _add(self, a, b):
        return self._norm(a[0] + b[0], (a[1] + b[1]) % 2)

    def _mul(self, a, b):
        return self._norm(a[0] * b[0], a[1] * b[1])


class _Mod2(Semiring):
    kind = Kind.MOD2
    flags = Flags(False, True, True, True, False, False)
    zero = 0
    one = 1

    def coerce(self, v):
        if isinstance(v, bool):
            return int(v)
        if isinstance(v, int) and v in (0, 1):
            return v
        raise CarrierError(f"{v!r} is not in Z2")

    def parse(self, text):
        if text.strip() in ("0", "1"):
            return int(text)
        raise ParseError(f"not a Z2 literal: {text!r}")

    def format(self, v):
        return str(v)

    def _add(self, a, b):
        return a ^ b

    def _mul(self, a, b):
        return a & b


BOOLEAN = _Boolean()
NATURALS = _Naturals()
NONNEG_RATIONALS = _NonNegRationals()
TROPICAL = _Tropical()
VITERBI = _Viterbi()
LUKASIEWICZ = _Lukasiewicz()
PAIRNZ2 = _PairNZ2()
MOD2 = _Mod2()

ALL_SEMIRINGS = (BOOLEAN, NATURALS, NONNEG_RATIONALS, TROPICAL, VITERBI,
                 LUKASIEWICZ, PAIRNZ2, MOD2)
_BY_TAG = {s.tag: s for s in ALL_SEMIRINGS}


def get_semiring(tag: str) -> Semiring:
    try:
        return _BY_TAG[tag.strip().lower()]
    except KeyError:
        raise ParseError(f"unknown semiring tag {tag!r}; expected one of "
                         + ", ".join(_BY_TAG)) from None


def default_samples(K: Semiring) -> list:
    """A small sample set used by the law harness and the CLI."""
    h = Fraction(1, 2)
    q = Fraction(1, 4)
    return {
        Kind.BOOLEAN: [False, True],
        Kind.NATURALS: [0, 1, 2, 3],
        Kind.NONNEG_RATIONALS: [Fraction(0), q, h, Fraction(1), Fraction(3)],
        Kind.TROPICAL: [INF, Fraction(0), h, Fraction(1), Fraction(5)],
        Kind.VITERBI: [Fraction(0), q, h, Fraction(1)],
        Kind.LUKASIEWICZ: [Fraction(0), q, h, Fraction(3, 4), Fraction(1)],
        Kind.PAIRNZ2: [(0, 0), (1, 0), (1, 1), (2, 0), (2, 1), (3, 1)],
        Kind.MOD2: [0, 1],
    }[K.kind]


@dataclass
class LawReport:
    """Outcome of :func:`check_semiring_laws`.

    ``violations`` lists axiom failures and flag claims contradicted by the
    samples; it is empty for every shipped instance.  ``refuted`` maps each
    capability property to a counterexample found on the samples, whether
    or not the instance claims the property.
    """

    semiring: str
    violations: list[str] = field(default_factory=list)
    refuted: dict[str, tuple] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.violations


def check_semiring_laws(K: Semiring, samples: list) -> LawReport:
    if not samples:
        raise ValueError("samples must be non-empty")
    xs = [K.coerce(s) for s in samples]
    add, mul, zero, one = K._add, K._mul, K.zero, K.one
    rep = LawReport(K.tag)

    def law(name, ok, *wit):
        if not ok and not any(v.startswith(name + ":") for v in rep.violations):
            rep.violations.append(f"{name}: {tuple(K.format(w) for w in wit)}")

    if zero == one:
        rep.violations.append("nontrivial: zero equals one")
    for a in xs:
        law("add-identity", add(a, zero) == a, a)
        law("mul-identity", mul(a, one) == a, a)
        law("absorption", mul(a, zero) == zero and mul(zero, a) == zero, a)
    for a, b in itertools.product(xs, repeat=2):
        law("add-commutative", add(a, b) == add(b, a), a, b)
        law("mul-commutative", mul(a, b) == mul(b, a), a, b)
    for a, b, c in itertools.product(xs, repeat=3):
        law("add-associative", add(add(a, b), c) == add(a, add(b, c)), a, b, c)
        law("mul-associative", mul(mul(a, b), c) == mul(a, mul(b, c)), a, b, c)
        law("distributive", mul(a, add(b, c)) == add(mul(a, b), mul(a, c)), a, b, c)

    def refute(prop, *wit):
        rep.refuted.setdefault(prop, wit)

    for a, b in itertools.product(xs, repeat=2):
        if add(a, b) == zero and (a != zero or b != zero):
            refute("plus_positive", a, b)
        if mul(a, b) == zero and a != zero and b != zero:
            refute("no_zero_divisors", a, b)
    for a in xs:
        if add(a, a) != a:
            refute("add_idempotent", a)
    for a, b, c in itertools.product(xs, repeat=3):
        if a != zero and b != c and mul(a, b) == mul(a, c):
            refute("mult_cancellative", a, b, c)
        if b != c and add(a, b) == add(a, c):
            refute("add_cancellative", a, b, c)
    # natural preorder restricted to witnesses drawn from the samples
    reach = {(a, b) for a, c in itertools.product(xs, repeat=2) for b in [add(a, c)]}
    for a, b in itertools.product(xs, repeat=2):
        if a != b and (a, b) in reach and (b, a) in reach:
            refute("naturally_totally_ordered", a, b)

    flags = K.flags.as_dict()
    for prop, wit in rep.refuted.items():
        if flags[prop]:
            rep.violations.append(
                f"flag {prop} claimed but refuted by {tuple(K.format(w) for w in wit)}")
    if K.flags.mult_cancellative and not K.flags.no_zero_divisors:
        rep.violations.append("flag consistency: mult_cancellative without no_zero_divisors")
    if K.flags.naturally_totally_ordered:
        leq = K._natural_leq
        for a, c in itertools.product(xs, repeat=2):
            if not leq(a, add(a, c)):
                law("natural-order-witness", False, a, c)
        for a, b in itertools.product(xs, repeat=2):
            law("natural-order-total", leq(a, b) or leq(b, a), a, b)
            law("natural-order-antisymmetric", not (leq(a, b) and leq(b, a)) or a == b, a, b)
        for a, b, c in itertools.product(xs, repeat=3):
            law("natural-order-transitive", not (leq(a, b) and leq(b, c)) or leq(a, c), a, b, c)
    return rep
