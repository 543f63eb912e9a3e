"""Measure-preserving quarter swaps and their action on indices and coefficients.

For a tree index (h, i) the swap interchanges the two middle quarter cells of
the support interval (levels h+1, positions 4i-2 and 4i-1) by a translation
of 2^(-h-1).  Composing Haar functions with the swap permutes most indices
(shifts inside the swapped quarters, identity elsewhere) and mixes the three
functions sitting on the fork {(h,i), (h+1,2i-1), (h+1,2i)} linearly.

The set-level transform fires at an admissible index (root in the set, both
successors absent): the root is replaced by its two successors and every
other index moves to its image.  Repeating this at low levels compresses any
finite set into a band of its local height; compress() records the trace.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple

from .combination import HaarCombination
from .combinatorics import local_height
from .config import check_level
from .dyadic import (
    DyadicInterval,
    DyadicRational,
    HaarIndex,
    check_haar_index,
    dyadic_band,
    haar_eval,
    half_power,
    max_level_of,
)
from .errors import DomainError, PreconditionError


class ForkTransform(NamedTuple):
    h: int
    i: int


def check_fork(fork: tuple[int, int]) -> ForkTransform:
    h, i = fork
    check_haar_index(h, i)
    check_level(h + 1, "fork successor level")
    return ForkTransform(h, i)


def swapped_quarters(fork: tuple[int, int]) -> tuple[DyadicInterval, DyadicInterval]:
    """The two middle quarter cells of the fork's support interval."""
    h, i = check_fork(fork)
    return DyadicInterval(h + 1, 4 * i - 2), DyadicInterval(h + 1, 4 * i - 1)


def swap_point(fork: tuple[int, int], t: DyadicRational) -> DyadicRational:
    """Apply the quarter swap to a point: translate by ±2^(-h-1) or fix."""
    first, second = swapped_quarters(fork)
    h = first.level - 1
    if first.contains(t):
        return t.shifted(1, h + 1)
    if second.contains(t):
        return t.shifted(-1, h + 1)
    return t


class FateKind(Enum):
    FORK_ROOT = "fork-root"
    FORK_SUCCESSOR = "fork-successor"
    SHIFT_RIGHT = "shift-right"
    SHIFT_LEFT = "shift-left"
    INVARIANT = "invariant"


class IndexFate(NamedTuple):
    kind: FateKind
    offset: int = 0


def classify_index(fork: tuple[int, int], idx: tuple[int, int]) -> IndexFate:
    """Case analysis of how the swap acts on one Haar index.

    Indexes supported inside the first swapped quarter shift right by
    2^(k-h-2) positions, those inside the second shift left; the three fork
    members mix linearly and everything else is untouched.
    """
    h, i = check_fork(fork)
    k, j = check_haar_index(*idx)
    if (k, j) == (h, i):
        return IndexFate(FateKind.FORK_ROOT)
    if k == h + 1 and j in (2 * i - 1, 2 * i):
        return IndexFate(FateKind.FORK_SUCCESSOR)
    if k >= h + 2:
        cell = DyadicInterval(k - 1, j)
        first, second = swapped_quarters(fork)
        if first.contains_interval(cell):
            return IndexFate(FateKind.SHIFT_RIGHT, 1 << (k - h - 2))
        if second.contains_interval(cell):
            return IndexFate(FateKind.SHIFT_LEFT, 1 << (k - h - 2))
    return IndexFate(FateKind.INVARIANT)


def index_image(fork: tuple[int, int], idx: tuple[int, int]) -> HaarIndex:
    """Image index under the swap; rejects fork members (they do not map
    to a single Haar function, see rewrite_combination)."""
    fate = classify_index(fork, idx)
    k, j = idx
    if fate.kind is FateKind.SHIFT_RIGHT:
        return HaarIndex(k, j + fate.offset)
    if fate.kind is FateKind.SHIFT_LEFT:
        return HaarIndex(k, j - fate.offset)
    if fate.kind is FateKind.INVARIANT:
        return HaarIndex(k, j)
    raise DomainError(f"index {tuple(idx)} belongs to the fork at {tuple(fork)}")


# ---------------------------------------------------------------------------
# the three fork relations
#
# Values of composed Haar functions live in Q[sqrt(2)]; a pair (a, b) stands
# for a + b*sqrt(2) with exact Fractions, which keeps the pointwise identity
# checks free of rounding.

Sqrt2Pair = tuple[Fraction, Fraction]

_ZERO: Sqrt2Pair = (Fraction(0), Fraction(0))
_HALF: Sqrt2Pair = (Fraction(1, 2), Fraction(0))
_NEG_HALF: Sqrt2Pair = (Fraction(-1, 2), Fraction(0))
_HALF_SQRT2: Sqrt2Pair = (Fraction(0), Fraction(1, 2))  # both sqrt(2)/2 and 1/sqrt(2)

# rows over the basis (root, first successor, second successor): the row r
# gives the coefficients of (basis member r) composed with the swap
FORK_RELATION_ROWS: tuple[tuple[Sqrt2Pair, Sqrt2Pair, Sqrt2Pair], ...] = (
    (_ZERO, _HALF_SQRT2, _HALF_SQRT2),
    (_HALF_SQRT2, _HALF, _NEG_HALF),
    (_HALF_SQRT2, _NEG_HALF, _HALF),
)


def _pair_add(a: Sqrt2Pair, b: Sqrt2Pair) -> Sqrt2Pair:
    return (a[0] + b[0], a[1] + b[1])


def _pair_mul(a: Sqrt2Pair, b: Sqrt2Pair) -> Sqrt2Pair:
    return (a[0] * b[0] + 2 * a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _haar_value_pair(k: int, j: int, t: DyadicRational) -> Sqrt2Pair:
    v = haar_eval(k, j, t)
    if v.sign == 0:
        return _ZERO
    q, r = divmod(v.half_exponent, 2)
    if r == 0:
        return (Fraction(v.sign * (1 << q)), Fraction(0))
    return (Fraction(0), Fraction(v.sign * (1 << q)))


def fork_members(fork: tuple[int, int]) -> tuple[HaarIndex, HaarIndex, HaarIndex]:
    h, i = check_fork(fork)
    return (
        HaarIndex(h, i),
        HaarIndex(h + 1, 2 * i - 1),
        HaarIndex(h + 1, 2 * i),
    )


def fork_identity_table(fork: tuple[int, int]) -> tuple[tuple[float, float, float], ...]:
    """Float coefficient rows of the three fork relations."""
    check_fork(fork)
    sqrt2 = 2.0**0.5
    return tuple(
        tuple(float(a) + float(b) * sqrt2 for a, b in row) for row in FORK_RELATION_ROWS
    )


def fork_relations_hold(
    fork: tuple[int, int],
    grid_level: int | None = None,
    rows: tuple[tuple[Sqrt2Pair, Sqrt2Pair, Sqrt2Pair], ...] = FORK_RELATION_ROWS,
) -> bool:
    """Exact pointwise check of the three relations on a dyadic grid.

    The default grid level h+3 resolves every breakpoint involved; the rows
    argument exists so verification suites can inject faults.
    """
    h, _ = check_fork(fork)
    level = grid_level if grid_level is not None else h + 3
    check_level(level, "grid level")
    members = fork_members(fork)
    for q in range(1 << level):
        t = DyadicRational(q, level)
        u = swap_point(fork, t)
        basis_at_t = [_haar_value_pair(k, j, t) for k, j in members]
        for row, member in zip(rows, members):
            lhs = _haar_value_pair(member.k, member.j, u)
            rhs = _ZERO
            for coeff, val in zip(row, basis_at_t):
                rhs = _pair_add(rhs, _pair_mul(coeff, val))
            if lhs != rhs:
                return False
    return True


# ---------------------------------------------------------------------------
# set-level transform and compression


def is_admissible(indices: Iterable[tuple[int, int]], h: int, i: int) -> bool:
    """True iff (h,i) is in the set and neither successor is."""
    idx = frozenset(HaarIndex(*x) for x in indices)
    return (
        HaarIndex(h, i) in idx
        and HaarIndex(h + 1, 2 * i - 1) not in idx
        and HaarIndex(h + 1, 2 * i) not in idx
    )


def fork_split(indices: Iterable[tuple[int, int]], fork: tuple[int, int]) -> frozenset[HaarIndex]:
    """Fire the transform at an admissible index.

    The root is replaced by its two successors; every other index moves to
    its image under the swap.  Cardinality grows by one and local height is
    preserved.
    """
    h, i = check_fork(fork)
    idx = frozenset(check_haar_index(*x) for x in indices)
    if not is_admissible(idx, h, i):
        raise PreconditionError(f"fork {(h, i)} is not admissible for the set")
    root, s1, s2 = fork_members(fork)
    out = {s1, s2}
    for member in idx:
        if member != root:
            out.add(index_image(fork, member))
    return frozenset(out)


def rewrite_combination(f: HaarCombination, fork: tuple[int, int]) -> HaarCombination:
    """Coefficient family of f composed with the swap.

    The two successors each receive the root coefficient divided by sqrt(2);
    all other coefficients move to their image index.  Requires that neither
    successor carries a nonzero coefficient already (same admissibility shape
    as the set-level transform; the root itself may be absent or zero).
    """
    h, i = check_fork(fork)
    root, s1, s2 = fork_members(fork)
    sup = f.support()
    if s1 in sup or s2 in sup:
        raise PreconditionError(
            f"fork {(h, i)} successors carry nonzero coefficients"
        )
    out: dict[HaarIndex, "object"] = {}
    root_x = None
    for idx, x in f.items():
        if idx == root:
            root_x = x
        elif idx in (s1, s2):
            continue  # explicit zero at a successor is absorbed by the split
        else:
            out[index_image(fork, idx)] = x
    if root_x is not None:
        shared = root_x * half_power(-1)
        out[s1] = shared
        out[s2] = shared
    return HaarCombination(f.dim, out)


@dataclass(frozen=True)
class CompressionTrace:
    """Record of a full compression run."""

    steps: tuple[ForkTransform, ...]
    initial_set: frozenset[HaarIndex]
    final_set: frozenset[HaarIndex]
    m: int

    def height(self) -> int:
        return local_height(self.initial_set)

    def band(self) -> tuple[int, int]:
        """(m+1, m+n): levels of the band containing the final set."""
        n = self.height()
        return (self.m + 1, self.m + n)

    def replay(self) -> Iterator[frozenset[HaarIndex]]:
        """All intermediate sets, starting at the initial one."""
        current = self.initial_set
        yield current
        for fork in self.steps:
            current = fork_split(current, fork)
            yield current

    def validate(self) -> None:
        """Re-run the trace and verify every invariant; raises on failure."""
        n = self.height()
        sets = list(self.replay())
        if sets[-1] != self.final_set:
            raise AssertionError("trace replay does not reach the final set")
        for before, after in zip(sets, sets[1:]):
            if len(after) != len(before) + 1:
                raise AssertionError("step did not grow cardinality by one")
            if local_height(after) != n:
                raise AssertionError("step changed local height")
        lo, hi = self.band()
        if not self.final_set <= dyadic_band(lo, hi):
            raise AssertionError("final set escapes the target band")


def compress(indices: Iterable[tuple[int, int]]) -> CompressionTrace:
    """Push a set into the band of its local height.

    Fires transforms at admissible indices with h < m+n until none exist,
    scanning in lexicographic order for reproducible traces; m is minimal
    with the set contained in the depth-(m+n) tree, but at least 1.
    """
    start = frozenset(check_haar_index(*x) for x in indices)
    if not start:
        raise DomainError("cannot compress an empty index set")
    n = local_height(start)
    m = max(1, max_level_of(start) - n)
    top = m + n
    check_level(top, "target band level")
    budget = (1 << top) - 1 - len(start)
    current = start
    steps: list[ForkTransform] = []
    for _ in range(budget + 1):
        fired = None
        for h, i in sorted(current):
            if (
                h < top
                and HaarIndex(h + 1, 2 * i - 1) not in current
                and HaarIndex(h + 1, 2 * i) not in current
            ):
                fired = ForkTransform(h, i)
                break
        if fired is None:
            break
        current = fork_split(current, fired)
        steps.append(fired)
    else:
        raise AssertionError("compression exceeded its cardinality budget")
    return CompressionTrace(
        steps=tuple(steps), initial_set=start, final_set=current, m=m
    )
