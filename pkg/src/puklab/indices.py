"""Nested bit-sequence indices, their restriction maps, and sibling-pair streams.

A level-``r`` multi-index holds ``r+1`` bit sequences whose lengths drop by
one from ``m+r`` down to ``m``.  Restrictions forget trailing sequences and
trailing bits; a *sibling pair* at level ``r`` is a distinct pair agreeing
after restriction to level ``r−1``.  Sibling pairs are the carriers of the
pair values that drive the inductive masa construction, bundled here as
:class:`LambdaSpec`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .errors import (
    CountCapError,
    InvalidLambdaError,
    RestrictionRangeError,
)
from .nsets import NSet, is_valid_value

# Enumerations larger than this raise instead of looping for minutes.
ENUMERATION_CAP = 1 << 22


class _Root:
    """The common restriction of every multi-index at level −1."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ROOT"


ROOT = _Root()


@dataclass(frozen=True, order=True)
class MultiIndex:
    """An element of the level-``r`` index set with final sequence length ``m``.

    ``words[t]`` packs sequence ``t`` as an integer with its first bit in the
    highest position, so truncating trailing bits is a right shift and
    lexicographic order is integer order.
    """

    r: int
    m: int
    words: tuple[int, ...]

    def __post_init__(self):
        if self.r < 0 or self.m < 1 or len(self.words) != self.r + 1:
            raise ValueError(f"malformed multi-index ({self.r}, {self.m}, {self.words})")
        for t, w in enumerate(self.words):
            if not 0 <= w < (1 << self.seq_length(t)):
                raise ValueError(f"word {t} out of range for length {self.seq_length(t)}")

    def seq_length(self, t: int) -> int:
        return self.m + self.r - t

    def bits(self, t: int) -> str:
        return format(self.words[t], f"0{self.seq_length(t)}b")

    def to_bits(self) -> tuple[str, ...]:
        return tuple(self.bits(t) for t in range(self.r + 1))

    @classmethod
    def from_bits(cls, seqs) -> "MultiIndex":
        seqs = [str(s) for s in seqs]
        if not seqs or any(set(s) - {"0", "1"} for s in seqs):
            raise ValueError(f"expected bit strings, got {seqs}")
        r, m = len(seqs) - 1, len(seqs[-1])
        lengths = [len(s) for s in seqs]
        if lengths != [m + r - t for t in range(r + 1)]:
            raise ValueError(f"sequence lengths {lengths} must step down by one to {m}")
        return cls(r, m, tuple(int(s, 2) for s in seqs))

    @property
    def branch(self) -> int:
        """First bit of the leading sequence; the level-0 restriction."""
        return self.words[0] >> (self.seq_length(0) - 1)


def index_count(r: int, m: int) -> int:
    """Size of the level-``r`` index set with final length ``m``."""
    return 1 << ((r + 1) * m + r * (r + 1) // 2)


def iter_indices(r: int, m: int, cap: int = ENUMERATION_CAP):
    """All multi-indices at ``(r, m)`` in lexicographic order (leading word slowest)."""
    total = index_count(r, m)
    if total > cap:
        raise CountCapError(f"{total} indices at ({r}, {m}) exceed the cap {cap}")
    ranges = [range(1 << (m + r - t)) for t in range(r + 1)]
    for words in itertools.product(*ranges):
        yield MultiIndex(r, m, words)


def restrict(i: MultiIndex, s: int, l: int) -> MultiIndex:
    """Restriction to level ``s`` and final length ``l``: drop sequences and tail bits."""
    if not (0 <= s <= i.r) or not (1 <= l <= i.m + i.r - s):
        raise RestrictionRangeError(f"cannot restrict ({i.r}, {i.m}) to ({s}, {l})")
    shift = (i.m + i.r) - (l + s)
    return MultiIndex(s, l, tuple(w >> shift for w in i.words[: s + 1]))


def pipe(i: MultiIndex, s: int):
    """Restriction to final length one at level ``s``; level −1 is the shared root."""
    if s == -1:
        return ROOT
    return restrict(i, s, 1)


def geq(i: MultiIndex, k: MultiIndex) -> bool:
    """True when ``i`` restricts to ``k``."""
    return restrict(i, k.r, k.m) == k


def level_zero(bit: int) -> MultiIndex:
    return MultiIndex(0, 1, (bit,))


def fiber(parent: MultiIndex) -> list[MultiIndex]:
    """Elements of the next level restricting to ``parent`` (final length one)."""
    if parent.m != 1:
        raise RestrictionRangeError("fibers are taken over final-length-one indices")
    r = parent.r + 1
    out = []
    for bits in itertools.product((0, 1), repeat=r + 1):
        words = tuple((w << 1) | b for w, b in zip(parent.words, bits)) + (bits[-1],)
        out.append(MultiIndex(r, 1, words))
    return out


def sibling_pair_count(r: int) -> int:
    """Number of sibling pairs at level ``r``."""
    if r == 0:
        return 1
    return index_count(r - 1, 1) * comb(1 << (r + 1), 2)


def iter_sibling_pairs(r: int):
    """Sibling pairs ``(i, j)`` with ``i < j``, ordered lexicographically by pair."""
    if r == 0:
        yield (level_zero(0), level_zero(1))
        return
    for i in iter_indices(r, 1):
        mates = fiber(pipe(i, r - 1))
        for j in mates:
            if j > i:
                yield (i, j)


def cross_pair_count(r: int) -> int:
    """Pairs with one index in each branch; only the sibling pair exists at level 0."""
    if r == 0:
        return 1
    half = index_count(r, 1) // 2
    return half * half


def iter_cross_pairs(r: int):
    """Cross-branch pairs ``(i, j)`` with ``i`` in branch 0, lexicographic by pair."""
    if r == 0:
        yield (level_zero(0), level_zero(1))
        return
    everything = list(iter_indices(r, 1))
    half = len(everything) // 2
    for i in everything[:half]:
        for j in everything[half:]:
            yield (i, j)


# ---------------------------------------------------------------------------
# pair-value specifications


def _check_value(v):
    if not is_valid_value(v):
        raise InvalidLambdaError(f"pair values must be positive integers or inf: {v!r}")
    return v


@dataclass(frozen=True)
class Override:
    """A single pair value pinned at level ``r``; indices are a sibling pair."""

    r: int
    i: MultiIndex
    j: MultiIndex
    value: object  # positive int or math.inf

    def __post_init__(self):
        _check_value(self.value)
        if self.i > self.j:
            lo, hi = self.j, self.i
            object.__setattr__(self, "i", lo)
            object.__setattr__(self, "j", hi)
        i, j = self.i, self.j
        if i.r != self.r or j.r != self.r or i.m != 1 or j.m != 1:
            raise InvalidLambdaError(f"override indices must live at level {self.r}, length 1")
        if i == j or pipe(i, self.r - 1) != pipe(j, self.r - 1):
            raise InvalidLambdaError("override indices must form a sibling pair")


@dataclass(frozen=True)
class QuadrantRules:
    """Per-branch value sets for the direct-sum construction.

    ``both_zero`` covers sibling pairs inside branch 0 (levels ≥ 1),
    ``both_one`` those inside branch 1, and ``mixed`` the cross-branch pairs
    (the unique level-0 pair first, then one pair per branch-0/branch-1
    combination at each deeper level).  Values are assigned round-robin along
    each stream.
    """

    both_zero: NSet
    both_one: NSet
    mixed: NSet

    def __post_init__(self):
        for s in (self.both_zero, self.both_one, self.mixed):
            if s.is_empty:
                raise InvalidLambdaError("quadrant value sets must be non-empty")


@dataclass(frozen=True)
class LambdaSpec:
    """Symmetric pair values over the sibling-pair stream.

    Values resolve in order: explicit overrides, then the cyclic enumeration
    of a finite target set over the canonical pair stream (ascending level,
    then lexicographic), then quadrant rules, then the default.  Enumeration
    and quadrant rules are mutually exclusive.
    """

    default: object = 1
    overrides: tuple[Override, ...] = ()
    enumeration: NSet | None = None
    quadrants: QuadrantRules | None = None

    def __post_init__(self):
        _check_value(self.default)
        if self.enumeration is not None and self.enumeration.is_empty:
            raise InvalidLambdaError("enumeration target must be non-empty")
        if self.enumeration is not None and self.quadrants is not None:
            raise InvalidLambdaError("enumeration and quadrant rules cannot be combined")
        if self.quadrants is not None and self.overrides:
            raise InvalidLambdaError("overrides are not supported with quadrant rules")
        seen = set()
        for o in self.overrides:
            key = (o.r, o.i, o.j)
            if key in seen:
                raise InvalidLambdaError(f"duplicate override for pair {key}")
            seen.add(key)

    # -- stream bookkeeping ------------------------------------------------

    def _override_map(self) -> dict:
        return {(o.r, o.i, o.j): o.value for o in self.overrides}

    def max_override_level(self) -> int:
        return max((o.r for o in self.overrides), default=-1)

    def _enum_offset(self, r: int) -> int:
        return sum(sibling_pair_count(s) for s in range(r))

    def _branch_offset(self, r: int) -> int:
        # branch pairs appear from level 1 on; both branch streams grow alike
        return sum(sibling_pair_count(s) // 2 for s in range(1, r))

    def _mixed_offset(self, r: int) -> int:
        return sum(cross_pair_count(s) for s in range(r))

    def value(self, r: int, i: MultiIndex, j: MultiIndex):
        """The value carried by the pair ``{i, j}`` at level ``r``; symmetric."""
        if i > j:
            i, j = j, i
        if i == j or i.r != r or j.r != r or i.m != 1 or j.m != 1:
            raise InvalidLambdaError(f"not a level-{r} pair: {i}, {j}")
        sibling = pipe(i, r - 1) == pipe(j, r - 1)
        if sibling:
            hit = self._override_map().get((r, i, j))
            if hit is not None:
                return hit
        if self.quadrants is not None:
            return self._quadrant_value(r, i, j, sibling)
        if not sibling:
            raise InvalidLambdaError("only sibling pairs carry values without quadrant rules")
        if self.enumeration is not None:
            pos = self._enum_offset(r) + _sibling_position(r, i, j)
            return _cycle(self.enumeration, pos)
        return self.default

    def _quadrant_value(self, r: int, i: MultiIndex, j: MultiIndex, sibling: bool):
        if i.branch != j.branch:
            if not sibling and r == 0:
                raise InvalidLambdaError("impossible pair")
            pos = self._mixed_offset(r) + (0 if r == 0 else _cross_position(r, i, j))
            return _cycle(self.quadrants.mixed, pos)
        if not sibling:
            raise InvalidLambdaError("same-branch pairs carry values only when siblings")
        target = self.quadrants.both_zero if i.branch == 0 else self.quadrants.both_one
        local = _sibling_position(r, i, j)
        half = sibling_pair_count(r) // 2
        if i.branch == 1:
            local -= half
        return _cycle(target, self._branch_offset(r) + local)

    def level_assignments(self, r: int):
        """All value-carrying pairs at level ``r`` with their values, in stream order."""
        overrides = self._override_map()
        if self.quadrants is None:
            offset = self._enum_offset(r) if self.enumeration is not None else 0
            for pos, (i, j) in enumerate(iter_sibling_pairs(r)):
                hit = overrides.get((r, i, j))
                if hit is not None:
                    yield (i, j), hit
                elif self.enumeration is not None:
                    yield (i, j), _cycle(self.enumeration, offset + pos)
                else:
                    yield (i, j), self.default
            return
        # quadrant rules: branch siblings carry E/F, cross pairs carry G
        if r == 0:
            yield (level_zero(0), level_zero(1)), _cycle(self.quadrants.mixed, 0)
            return
        half = sibling_pair_count(r) // 2
        for pos, (i, j) in enumerate(iter_sibling_pairs(r)):
            if i.branch == 0:
                yield (i, j), _cycle(self.quadrants.both_zero, self._branch_offset(r) + pos)
            else:
                yield (i, j), _cycle(
                    self.quadrants.both_one, self._branch_offset(r) + pos - half
                )
        for pos, (i, j) in enumerate(iter_cross_pairs(r)):
            yield (i, j), _cycle(self.quadrants.mixed, self._mixed_offset(r) + pos)

    # -- value sets without enumeration -------------------------------------

    def value_set_at_level(self, r: int, quadrant: str | None = None) -> NSet:
        """Set of values over the level-``r`` pairs, optionally quadrant-restricted.

        ``quadrant`` is one of ``None`` (everything), ``"both_zero"``,
        ``"both_one"`` or ``"mixed"``; computed from pair counts without
        enumerating pairs whenever possible.
        """
        if self.quadrants is not None:
            return self._quadrant_value_set(r, quadrant)
        count = sibling_pair_count(r)
        if quadrant == "mixed":
            count = 1 if r == 0 else 0
            local_offset = 0
        elif quadrant in ("both_zero", "both_one"):
            half = count // 2 if r >= 1 else 0
            local_offset = 0 if quadrant == "both_zero" else half
            count = half
        elif quadrant is None:
            local_offset = 0
        else:
            raise ValueError(f"unknown quadrant {quadrant!r}")
        if count == 0:
            return NSet()
        at_level = [o.value for o in self.overrides if o.r == r]
        if self.enumeration is not None:
            offset = self._enum_offset(r) + local_offset
            base = _cyclic_slice(self.enumeration, offset, count)
        else:
            base = {self.default}
        if not at_level:
            return NSet.from_iterable(base)
        return self._value_set_with_overrides(r, quadrant, base, at_level)

    def _value_set_with_overrides(self, r, quadrant, base, at_level) -> NSet:
        count = sibling_pair_count(r)
        if count <= (1 << 16):
            values = set()
            for (i, j), v in self.level_assignments(r):
                if quadrant == "mixed" and not (r == 0):
                    continue
                if quadrant == "both_zero" and (r == 0 or i.branch != 0 or j.branch != 0):
                    continue
                if quadrant == "both_one" and (r == 0 or i.branch != 1 or j.branch != 1):
                    continue
                values.add(v)
            return NSet.from_iterable(values)
        # overrides can only hide a base value if they outnumber its occurrences
        L = len(self.enumeration) if self.enumeration is not None else 1
        if len(at_level) < count // L:
            return NSet.from_iterable(base | set(at_level))
        raise CountCapError(f"too many overrides to resolve exactly at level {r}")

    def _quadrant_value_set(self, r: int, quadrant: str | None) -> NSet:
        pieces = []
        if quadrant in (None, "both_zero") and r >= 1:
            pieces.append(
                _cyclic_slice(
                    self.quadrants.both_zero,
                    self._branch_offset(r),
                    sibling_pair_count(r) // 2,
                )
            )
        if quadrant in (None, "both_one") and r >= 1:
            pieces.append(
                _cyclic_slice(
                    self.quadrants.both_one,
                    self._branch_offset(r),
                    sibling_pair_count(r) // 2,
                )
            )
        if quadrant in (None, "mixed"):
            pieces.append(
                _cyclic_slice(self.quadrants.mixed, self._mixed_offset(r), cross_pair_count(r))
            )
        out: set = set()
        for p in pieces:
            out |= p
        return NSet.from_iterable(out)

    def values_complete_by(self, r: int) -> bool:
        """True when levels beyond ``r`` can only repeat values already seen by ``r``."""
        if self.max_override_level() > r:
            return False
        seen = NSet()
        for s in range(r + 1):
            seen = seen | self.value_set_at_level(s)
        if self.enumeration is not None:
            eventual = self.enumeration
        elif self.quadrants is not None:
            eventual = self.quadrants.both_zero | self.quadrants.both_one | self.quadrants.mixed
        else:
            eventual = NSet.from_iterable([self.default])
        return eventual.issubset(seen)


def _cycle(target: NSet, position: int):
    values = target.sorted_values()
    return values[position % len(values)]


def _cyclic_slice(target: NSet, offset: int, count: int) -> set:
    values = target.sorted_values()
    if count <= 0:
        return set()
    if count >= len(values):
        return set(values)
    start = offset % len(values)
    return {values[(start + t) % len(values)] for t in range(count)}


def _sibling_position(r: int, i: MultiIndex, j: MultiIndex) -> int:
    """Position of a sibling pair in the lexicographic level-``r`` stream."""
    for pos, pair in enumerate(iter_sibling_pairs(r)):
        if pair == (i, j):
            return pos
    raise InvalidLambdaError(f"not a sibling pair at level {r}: {i}, {j}")


def _cross_position(r: int, i: MultiIndex, j: MultiIndex) -> int:
    half = index_count(r, 1) // 2
    rank_i = _lex_rank(i)
    rank_j = _lex_rank(j) - half
    if not (0 <= rank_i < half and 0 <= rank_j < half):
        raise InvalidLambdaError(f"not a cross pair at level {r}: {i}, {j}")
    return rank_i * half + rank_j


def _lex_rank(i: MultiIndex) -> int:
    rank = 0
    for t, w in enumerate(i.words):
        rank = (rank << i.seq_length(t)) | w
    return rank


# ---------------------------------------------------------------------------
# symbolic verification of the projection-family conditions


@dataclass(frozen=True)
class GlueReport:
    """Outcome of the exact rational checks on the nested projection families."""

    r_max: int
    m_max: int
    cases_checked: int
    failures: tuple[str, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def glue_check(r_max: int = 3, m_max: int = 3) -> GlueReport:
    """Verify the partition, refinement, and cross-level conditions symbolically.

    All traces are exact rationals.  Refinement fibers are generated directly
    and checked against the restriction maps, so the partitions are certified
    rather than assumed.  Bounds keep every index set within the requested
    ``(r_max, m_max)`` symbol range.
    """
    failures: list[str] = []
    cases = 0

    # (i) each level is a trace partition of the identity
    for s in range(r_max + 1):
        for m in range(1, m_max + 1):
            total = index_count(s, m)
            seen = sum(1 for _ in iter_indices(s, m))
            if seen != total:
                failures.append(f"(i) enumeration at ({s},{m}) gave {seen} != {total}")
            if total * Fraction(1, total) != 1:
                failures.append(f"(i) traces at ({s},{m}) do not sum to 1")
            cases += 1

    # (ii) growing the final length refines each projection into its fiber
    for s in range(r_max + 1):
        for m in range(1, m_max):
            parent_count, child_count = index_count(s, m), index_count(s, m + 1)
            fiber_size = 1 << (s + 1)
            if parent_count * fiber_size != child_count:
                failures.append(f"(ii) fiber size mismatch at ({s},{m})")
            if fiber_size * Fraction(1, child_count) != Fraction(1, parent_count):
                failures.append(f"(ii) traces do not add up at ({s},{m})")
            generated = 0
            for parent in iter_indices(s, m):
                for bits in itertools.product((0, 1), repeat=s + 1):
                    child = MultiIndex(
                        s, m + 1, tuple((w << 1) | b for w, b in zip(parent.words, bits))
                    )
                    generated += 1
                    if restrict(child, s, m) != parent:
                        failures.append(f"(ii) fiber element escapes its parent at ({s},{m})")
                        break
            if generated != child_count:
                failures.append(f"(ii) fibers do not partition level ({s},{m + 1})")
            cases += 1

    # (iii) deeper levels refine coarser ones across the grid
    for s in range(r_max + 1):
        for t in range(s + 1, r_max + 1):
            for m in range(1, m_max + 1):
                big = m + t - s
                if big > m_max:
                    continue
                parent_count, child_count = index_count(s, big), index_count(t, m)
                fiber_size = 1 << sum(m + t - u for u in range(s + 1, t + 1))
                if parent_count * fiber_size != child_count:
                    failures.append(f"(iii) fiber size mismatch at s={s},t={t},m={m}")
                if fiber_size * Fraction(1, child_count) != Fraction(1, parent_count):
                    failures.append(f"(iii) traces do not add up at s={s},t={t},m={m}")
                generated = 0
                free = [range(1 << (m + t - u)) for u in range(s + 1, t + 1)]
                for parent in iter_indices(s, big):
                    for extra in itertools.product(*free):
                        child = MultiIndex(t, m, parent.words + tuple(extra))
                        generated += 1
                        if restrict(child, s, big) != parent:
                            failures.append(
                                f"(iii) fiber element escapes its parent at s={s},t={t},m={m}"
                            )
                            break
                if generated != child_count:
                    failures.append(f"(iii) fibers do not partition at s={s},t={t},m={m}")
                cases += 1

    # dyadic splitting at the symbol level
    for m in range(1, m_max):
        for w in range(1 << m):
            children = {k for k in range(1 << (m + 1)) if k >> 1 == w}
            if children != {(w << 1) | 0, (w << 1) | 1}:
                failures.append(f"dyadic split of {w:0{m}b} is not its two extensions")
        cases += 1

    return GlueReport(r_max, m_max, cases, tuple(failures))
