"""Shared oracles and generators for the test suite."""

import math

import numpy as np

from haarlab.combination import HaarCombination
from haarlab.dyadic import DyadicRational, HaarIndex, branch, max_level_of


def brute_local_height(indices) -> int:
    """Reference local height: scan every branch at full resolution."""
    idx = frozenset(HaarIndex(*i) for i in indices)
    if not idx:
        return 0
    top = max_level_of(idx)
    best = 0
    for q in range(1 << top):
        t = DyadicRational(q, top)
        best = max(best, len(idx & branch(t, top)))
    return best


def branch_count_profile(indices, resolution: int) -> list[int]:
    """|F intersect B(t)| for every level-`resolution` cell."""
    idx = frozenset(HaarIndex(*i) for i in indices)
    return [
        len(idx & branch(DyadicRational(q, resolution), resolution))
        for q in range(1 << resolution)
    ]


def all_subsets(pool):
    """Every subset of the given index pool, the empty one included."""
    pool = sorted(pool)
    for mask in range(1 << len(pool)):
        yield frozenset(pool[i] for i in range(len(pool)) if mask & (1 << i))


def random_combination(rng, indices, dim: int) -> HaarCombination:
    """Standard normal coefficients rescaled by 2^(-(k-1)/2) per index."""
    coeffs = {}
    for k, j in sorted(indices):
        coeffs[(k, j)] = rng.standard_normal(dim) * 2.0 ** (-(k - 1) / 2.0)
    return HaarCombination(dim, coeffs)


def quadrature_lp(values, p: float) -> float:
    """Reference L_p norm of a cell-value table under the Euclidean norm."""
    cell_norms = [math.sqrt(float(v @ v)) for v in values]
    return (math.fsum(c**p for c in cell_norms) / len(values)) ** (1.0 / p)


def random_subset(rng, pool, size: int):
    pool = sorted(pool)
    chosen = rng.choice(len(pool), size=size, replace=False)
    return frozenset(pool[i] for i in chosen)


def random_exact_height_set(rng, n: int, depth: int) -> frozenset[HaarIndex]:
    """Random F inside the depth-`depth` tree meeting every branch n times."""

    def build(need: int, levels: int, k: int, j: int):
        # (k, j) is the root of the current subtree (as a tree index)
        if need == 0:
            return []
        take_root = need == levels or rng.random() < 0.5
        out = []
        child_need = need
        if take_root:
            out.append(HaarIndex(k, j))
            child_need -= 1
        if child_need > 0:
            out += build(child_need, levels - 1, k + 1, 2 * j - 1)
            out += build(child_need, levels - 1, k + 1, 2 * j)
        return out

    if not 0 <= n <= depth:
        raise ValueError("need 0 <= n <= depth")
    return frozenset(build(n, depth, 1, 1))
