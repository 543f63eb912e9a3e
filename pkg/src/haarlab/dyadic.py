"""Exact arithmetic for the dyadic Haar system on [0, 1).

Points are dyadic rationals a/2^b kept as integer pairs, so interval
membership, Haar values and branch extraction are computed without floats.
All intervals are half open: the level-k cell with position j is
[(j-1)/2^k, j/2^k), positions are 1-based.

The Haar function with index (k, j), k >= 1, 1 <= j <= 2^(k-1), takes the
value +2^((k-1)/2) on the left half of its support cell (level k-1,
position j), -2^((k-1)/2) on the right half, and 0 elsewhere.  Values are
returned as (sign, half_exponent) pairs so that equality checks stay exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple

import numpy as np

from .config import check_level
from .errors import DomainError


@dataclass(frozen=True)
class DyadicRational:
    """A point num / 2^level in [0, 1)."""

    num: int
    level: int

    def __post_init__(self):
        if self.level < 0:
            raise DomainError(f"level must be >= 0, got {self.level}")
        check_level(self.level, "dyadic level")
        if not 0 <= self.num < (1 << self.level):
            raise DomainError(
                f"numerator {self.num} out of range for level {self.level}"
            )

    # value comparisons are cross-multiplied so representation does not matter
    def _cmp_key(self, other: "DyadicRational") -> tuple[int, int]:
        return self.num << other.level, other.num << self.level

    def __eq__(self, other):
        if not isinstance(other, DyadicRational):
            return NotImplemented
        a, b = self._cmp_key(other)
        return a == b

    def __lt__(self, other: "DyadicRational") -> bool:
        a, b = self._cmp_key(other)
        return a < b

    def __le__(self, other: "DyadicRational") -> bool:
        a, b = self._cmp_key(other)
        return a <= b

    def __hash__(self):
        return hash(self.reduced_pair())

    def reduced_pair(self) -> tuple[int, int]:
        """(num, level) with trailing powers of two cancelled."""
        if self.num == 0:
            return (0, 0)
        num, level = self.num, self.level
        while num % 2 == 0 and level > 0:
            num //= 2
            level -= 1
        return (num, level)

    def as_fraction(self) -> Fraction:
        return Fraction(self.num, 1 << self.level)

    def as_float(self) -> float:
        return math.ldexp(float(self.num), -self.level)

    def shifted(self, sign: int, exponent: int) -> "DyadicRational":
        """This point plus sign * 2^(-exponent), staying inside [0, 1)."""
        if exponent < 0:
            raise DomainError("shift exponent must be >= 0")
        level = max(self.level, exponent)
        num = (self.num << (level - self.level)) + sign * (1 << (level - exponent))
        if not 0 <= num < (1 << level):
            raise DomainError("shifted point leaves [0, 1)")
        return DyadicRational(num, level)

    def doubled(self) -> "DyadicRational":
        """2t for t in [0, 1/2)."""
        if self.level == 0 or self.num >= (1 << (self.level - 1)):
            raise DomainError("doubling requires t < 1/2")
        return DyadicRational(self.num, self.level - 1)


@dataclass(frozen=True)
class DyadicInterval:
    """The half-open cell [(position-1)/2^level, position/2^level)."""

    level: int
    position: int

    def __post_init__(self):
        if self.level < 0:
            raise DomainError(f"interval level must be >= 0, got {self.level}")
        check_level(self.level, "interval level")
        if not 1 <= self.position <= (1 << self.level):
            raise DomainError(
                f"position {self.position} out of range for level {self.level}"
            )

    def lower(self) -> Fraction:
        return Fraction(self.position - 1, 1 << self.level)

    def upper(self) -> Fraction:
        return Fraction(self.position, 1 << self.level)

    def measure(self) -> Fraction:
        return Fraction(1, 1 << self.level)

    def contains(self, t: DyadicRational) -> bool:
        # (position-1)/2^level <= num/2^b < position/2^level, cross-multiplied
        lhs = t.num << self.level
        return ((self.position - 1) << t.level) <= lhs < (self.position << t.level)

    def contains_interval(self, other: "DyadicInterval") -> bool:
        lo_ok = (self.position - 1) << other.level <= (other.position - 1) << self.level
        hi_ok = other.position << self.level <= self.position << other.level
        return lo_ok and hi_ok


class HaarIndex(NamedTuple):
    k: int
    j: int


def half_power(e: int) -> float:
    """2^(e/2) as a float with at most one rounding."""
    q, r = divmod(e, 2)
    v = math.ldexp(1.0, q)
    return v * math.sqrt(2.0) if r else v


class HaarValue(NamedTuple):
    """sign * 2^(half_exponent / 2); sign 0 encodes the value 0."""

    sign: int
    half_exponent: int

    def as_float(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * half_power(self.half_exponent)

    def squared(self) -> int:
        return 0 if self.sign == 0 else 1 << self.half_exponent


ZERO_VALUE = HaarValue(0, 0)


def check_haar_index(k: int, j: int) -> HaarIndex:
    if k < 1:
        raise DomainError(f"Haar index level must be >= 1, got k={k}")
    check_level(k, "Haar index level")
    if not 1 <= j <= (1 << (k - 1)):
        raise DomainError(f"Haar index position {j} out of range for level {k}")
    return HaarIndex(k, j)


def haar_eval(k: int, j: int, t: DyadicRational) -> HaarValue:
    """Exact value of the (k, j) Haar function at a dyadic point."""
    check_haar_index(k, j)
    # t lies in the level-k cell with position m iff
    # (m-1)*2^b <= num*2^k < m*2^b where t = num/2^b
    lhs = t.num << k
    lo = (2 * j - 2) << t.level
    mid = (2 * j - 1) << t.level
    hi = (2 * j) << t.level
    if lo <= lhs < mid:
        return HaarValue(1, k - 1)
    if mid <= lhs < hi:
        return HaarValue(-1, k - 1)
    return ZERO_VALUE


def support(k: int, j: int) -> DyadicInterval:
    """Support cell of the (k, j) Haar function: level k-1, position j."""
    check_haar_index(k, j)
    return DyadicInterval(k - 1, j)


def branch(t: DyadicRational, n: int) -> frozenset[HaarIndex]:
    """Indices of the n Haar functions whose support contains t, one per level."""
    if n < 0:
        raise DomainError(f"branch length must be >= 0, got {n}")
    check_level(n, "branch length")
    out = []
    for k in range(1, n + 1):
        lvl = k - 1
        if t.level >= lvl:
            j = (t.num >> (t.level - lvl)) + 1
        else:
            j = (t.num << (lvl - t.level)) + 1
        out.append(HaarIndex(k, j))
    return frozenset(out)


def translation_identity_check(k: int, j: int, t: DyadicRational) -> bool:
    """Left neighbour evaluated at t - 2^(1-k) matches index (k, j+1) at t."""
    check_haar_index(k, j)
    check_haar_index(k, j + 1)
    shifted = t.shifted(-1, k - 1)  # DomainError if t - 2^(1-k) < 0
    return haar_eval(k, j, shifted) == haar_eval(k, j + 1, t)


def scaling_identity_check(k: int, j: int, t: DyadicRational) -> bool:
    """Index (k+1, j) at t matches sqrt(2) times index (k, j) at 2t, t < 1/2."""
    check_haar_index(k, j)
    check_haar_index(k + 1, j)
    lhs = haar_eval(k + 1, j, t)  # t.doubled() raises for t >= 1/2
    rhs = haar_eval(k, j, t.doubled())
    if lhs.sign != rhs.sign:
        return False
    return lhs.sign == 0 or lhs.half_exponent == rhs.half_exponent + 1


# ---------------------------------------------------------------------------
# index sets

IndexSet = frozenset  # frozenset[HaarIndex]


def make_index_set(pairs: Iterable[tuple[int, int]]) -> frozenset[HaarIndex]:
    return frozenset(check_haar_index(k, j) for k, j in pairs)


def dyadic_band(m: int, n: int) -> frozenset[HaarIndex]:
    """All indices with level m <= k <= n."""
    if m < 1 or n < m:
        raise DomainError(f"band bounds must satisfy 1 <= m <= n, got ({m}, {n})")
    check_level(n, "band level")
    return frozenset(
        HaarIndex(k, j) for k in range(m, n + 1) for j in range(1, (1 << (k - 1)) + 1)
    )


def full_tree(n: int) -> frozenset[HaarIndex]:
    return dyadic_band(1, n)


def max_level_of(indices: frozenset[HaarIndex]) -> int:
    return max((k for k, _ in indices), default=0)


def sorted_indices(indices: Iterable[HaarIndex]) -> list[HaarIndex]:
    return sorted(indices)


def haar_sign_table(k: int, j: int, grid_level: int) -> np.ndarray:
    """Signs of the (k, j) Haar function on the 2^grid_level level cells.

    Entry q is the constant sign on [q/2^L, (q+1)/2^L); requires L >= k.
    """
    check_haar_index(k, j)
    check_level(grid_level, "grid level")
    if grid_level < k:
        raise DomainError("grid level must be at least the index level")
    table = np.zeros(1 << grid_level, dtype=np.int8)
    width = 1 << (grid_level - k)
    start = (2 * j - 2) * width
    table[start : start + width] = 1
    table[start + width : start + 2 * width] = -1
    return table
