"""Subsets of N ∪ {∞} and the set arithmetic the invariant formulas use.

An :class:`NSet` stores an explicit finite set of positive integers plus an
infinity flag; ``math.inf`` stands for ∞ wherever single values are passed
around.  The product convention is ``n·∞ = ∞·n = ∞``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

from .errors import EmptyInputError, NonSingletonInfiniteError

INF = math.inf


def is_valid_value(v) -> bool:
    """True for positive integers and ∞ (``math.inf``)."""
    if v == INF:
        return True
    return isinstance(v, int) and not isinstance(v, bool) and v >= 1


@dataclass(frozen=True)
class NSet:
    """A finite explicit subset of N plus an optional ∞ element."""

    finite: frozenset[int] = frozenset()
    has_infinity: bool = False

    def __post_init__(self):
        if not all(isinstance(v, int) and v >= 1 for v in self.finite):
            raise ValueError(f"finite part must contain positive integers: {self.finite}")

    @classmethod
    def of(cls, *values) -> "NSet":
        return cls.from_iterable(values)

    @classmethod
    def from_iterable(cls, values) -> "NSet":
        finite, has_inf = set(), False
        for v in values:
            if v == INF:
                has_inf = True
            elif is_valid_value(v):
                finite.add(int(v))
            else:
                raise ValueError(f"not a value in N ∪ {{∞}}: {v!r}")
        return cls(frozenset(finite), has_inf)

    @classmethod
    def parse(cls, text: str) -> "NSet":
        """Parse the textual form, e.g. ``"2,3,inf"``; empty text is the empty set."""
        text = text.strip()
        if not text:
            return cls()
        values = []
        for token in text.split(","):
            token = token.strip()
            values.append(INF if token == "inf" else int(token))
        return cls.from_iterable(values)

    def __str__(self) -> str:
        parts = [str(v) for v in sorted(self.finite)]
        if self.has_infinity:
            parts.append("inf")
        return ",".join(parts)

    def __contains__(self, v) -> bool:
        if v == INF:
            return self.has_infinity
        return v in self.finite

    def __len__(self) -> int:
        return len(self.finite) + (1 if self.has_infinity else 0)

    def __bool__(self) -> bool:
        return len(self) > 0

    def __or__(self, other: "NSet") -> "NSet":
        return NSet(self.finite | other.finite, self.has_infinity or other.has_infinity)

    def __mul__(self, other: "NSet") -> "NSet":
        return nset_product(self, other)

    def issubset(self, other: "NSet") -> bool:
        if self.has_infinity and not other.has_infinity:
            return False
        return self.finite <= other.finite

    @property
    def is_empty(self) -> bool:
        return len(self) == 0

    @property
    def is_singleton(self) -> bool:
        return len(self) == 1

    def sorted_values(self) -> list:
        """Members ascending, with ∞ last; useful for round-robin assignment."""
        out: list = sorted(self.finite)
        if self.has_infinity:
            out.append(INF)
        return out


EMPTY = NSet()
ONE = NSet(frozenset({1}))
INFINITY_SET = NSet(frozenset(), True)


def union_all(sets) -> NSet:
    return reduce(lambda a, b: a | b, sets, EMPTY)


def nset_product(e: NSet, f: NSet) -> NSet:
    """All pairwise products; ∞ appears iff one factor has ∞ and the other is non-empty."""
    finite = frozenset(m * n for m in e.finite for n in f.finite)
    has_inf = (e.has_infinity and bool(f)) or (f.has_infinity and bool(e))
    return NSet(finite, has_inf)


def tensor_mixed(factors) -> NSet:
    """Mixed invariant of a finite tensor product: the iterated set product."""
    return reduce(nset_product, factors, ONE)


def tensor_mixed_infinite(singletons, tail_all_ones: bool) -> NSet:
    """Mixed invariant of an infinite tensor product of singleton factors.

    ``singletons`` lists the leading factors; the unlisted tail is all ``{1}``
    when ``tail_all_ones`` is set, and otherwise repeats the last listed
    factor forever.  The result is the singleton product when all but finitely
    many factors are ``{1}``, and ``{∞}`` otherwise.  Non-singleton factors
    are rejected: the rule is only defined for singletons.
    """
    singletons = list(singletons)
    for s in singletons:
        if not s.is_singleton:
            raise NonSingletonInfiniteError(f"non-singleton factor: {s}")
    if not tail_all_ones:
        if not singletons:
            raise NonSingletonInfiniteError("an all-tail rule needs at least one factor")
        if singletons[-1] != ONE:
            return INFINITY_SET
    return tensor_mixed(singletons)


def direct_sum_puk(puk_a: NSet, puk_b: NSet, mixed_ab: NSet) -> NSet:
    """Invariant of a 2×2 direct sum: union of the two invariants and the mixed one."""
    for s in (puk_a, puk_b, mixed_ab):
        if s.is_empty:
            raise EmptyInputError("direct-sum rule needs non-empty inputs")
    return puk_a | puk_b | mixed_ab
