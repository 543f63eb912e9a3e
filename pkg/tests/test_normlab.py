"""Norm evaluation, closed forms, and the lower-bound estimators."""

import math

import numpy as np
import pytest

from haarlab.combination import HaarCombination
from haarlab.dyadic import full_tree
from haarlab.errors import DomainError
from haarlab.normlab import (
    EstimateMethod,
    apply_operator,
    comparison_check,
    conjugate_exponent,
    diagonal_formula_tau,
    diagonal_formula_tau_p,
    diagonal_formula_tau_p_values,
    diagonal_formula_tau_values,
    levelwise_rhs_p,
    lp_norm_of_combination,
    monotonicity_check,
    tau_estimate,
    tau_p_estimate,
    tau_p_ratio,
    tau_ratio,
    triangle_chain_check,
)
from haarlab.spaces import Norm, NormedSpaceSpec, OperatorSpec

from helpers import quadrature_lp, random_combination, random_exact_height_set


def example_diagonal(n: int, p: float, dim: int | None = None) -> OperatorSpec:
    """Diagonal entries k^(-1/p') on l1, truncated to the given dimension."""
    d = dim or n
    sigma = np.arange(1, d + 1, dtype=float) ** (-1.0 / conjugate_exponent(p))
    return OperatorSpec.diagonal(sigma, Norm.L1)


# ---------------------------------------------------------------------------
# lp_norm_of_combination


def test_lp_norm_unit_root():
    f = HaarCombination(2, {(1, 1): [1.0, 0.0]})
    space = NormedSpaceSpec(2, Norm.L1)
    for p in (1.0, 1.5, 2.0, 3.0):
        assert lp_norm_of_combination(f, space, p) == pytest.approx(1.0, rel=1e-14)


def test_lp_norm_orthonormality_level_two():
    f = HaarCombination(1, {(2, 1): [1.0]})
    assert lp_norm_of_combination(f, NormedSpaceSpec(1, Norm.L2), 2.0) == pytest.approx(
        1.0, rel=1e-14
    )
    # general p: 2^(1/2 - 1/p) for a unit coefficient on level 2
    for p in (1.0, 4.0 / 3.0, 2.0):
        expected = 2.0 ** (0.5 - 1.0 / p)
        assert lp_norm_of_combination(f, NormedSpaceSpec(1, Norm.L1), p) == pytest.approx(
            expected, rel=1e-14
        )


def test_lp_norm_parseval_two_terms():
    f = HaarCombination(1, {(1, 1): [1.0], (2, 1): [1.0]})
    assert lp_norm_of_combination(f, NormedSpaceSpec(1, Norm.L2), 2.0) == pytest.approx(
        math.sqrt(2.0), rel=1e-14
    )


def test_lp_norm_matches_quadrature_oracle():
    rng = np.random.default_rng(17)
    space = NormedSpaceSpec(3, Norm.L2)
    for _ in range(30):
        f = random_combination(rng, {(1, 1), (2, 2), (3, 1), (3, 4), (4, 7)}, 3)
        cells = f.cell_values(f.max_level())
        for p in (1.0, 4.0 / 3.0, 2.0):
            assert lp_norm_of_combination(f, space, p) == pytest.approx(
                quadrature_lp(cells, p), rel=1e-12
            )


def test_lp_norm_parseval_random():
    rng = np.random.default_rng(23)
    space = NormedSpaceSpec(4, Norm.L2)
    for _ in range(50):
        f = random_combination(rng, full_tree(4), 4)
        lhs = lp_norm_of_combination(f, space, 2.0)
        rhs = math.sqrt(f.squared_sum(space.norm_of))
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_lp_norm_l1_space_constant_function():
    f = HaarCombination(2, {(1, 1): [0.75, -0.5]})
    assert lp_norm_of_combination(f, NormedSpaceSpec(2, Norm.L1), 1.0) == pytest.approx(
        1.25, rel=1e-14
    )


def test_lp_norm_empty_and_errors():
    f = HaarCombination(2, {(1, 1): [0.0, 0.0]})
    space = NormedSpaceSpec(2, Norm.L2)
    assert lp_norm_of_combination(f, space, 2.0) == 0.0
    with pytest.raises(DomainError):
        lp_norm_of_combination(f, space, 0.5)
    with pytest.raises(DomainError):
        lp_norm_of_combination(f, NormedSpaceSpec(3, Norm.L2), 2.0)


# ---------------------------------------------------------------------------
# levelwise_rhs_p


def test_levelwise_frozen_examples():
    e = [1.0]
    assert levelwise_rhs_p(HaarCombination(1, {(1, 1): e}), NormedSpaceSpec(1, Norm.L2), 2.0) == 1.0
    f = HaarCombination(1, {(2, 1): e, (2, 2): e})
    assert levelwise_rhs_p(f, NormedSpaceSpec(1, Norm.L2), 1.0) == pytest.approx(
        math.sqrt(2.0), rel=1e-14
    )


def test_levelwise_p2_is_square_sum():
    rng = np.random.default_rng(31)
    space = NormedSpaceSpec(3, Norm.L2)
    for _ in range(50):
        f = random_combination(rng, full_tree(4), 3)
        assert levelwise_rhs_p(f, space, 2.0) == pytest.approx(
            math.sqrt(f.squared_sum(space.norm_of)), rel=1e-12
        )


@pytest.mark.parametrize("norm", list(Norm))
def test_levelwise_agrees_with_lp_norm_per_level(norm):
    # within one level the supports are disjoint, so the L_p norm of the
    # level block equals the weighted coefficient sum exactly
    rng = np.random.default_rng(37)
    space = NormedSpaceSpec(3, norm)
    for _ in range(20):
        f = random_combination(rng, full_tree(4), 3)
        for p in (1.0, 4.0 / 3.0, 1.7, 2.0):
            for k in range(1, 5):
                block = f.restricted_to({(kk, j) for kk, j in f.support() if kk == k})
                if not block.support():
                    continue
                assert levelwise_rhs_p(block, space, p) == pytest.approx(
                    lp_norm_of_combination(block, space, p), rel=1e-12
                )


def test_levelwise_rejects_bad_exponent():
    f = HaarCombination(1, {(1, 1): [1.0]})
    space = NormedSpaceSpec(1, Norm.L2)
    for p in (0.5, 2.5):
        with pytest.raises(DomainError):
            levelwise_rhs_p(f, space, p)


# ---------------------------------------------------------------------------
# closed forms


def test_diagonal_formula_frozen_values():
    p = 4.0 / 3.0
    assert diagonal_formula_tau(1, p) == 1.0
    assert diagonal_formula_tau_p(1, p) == 1.0
    expected_tau = math.sqrt(math.fsum(k ** (-0.5) for k in range(1, 5)))
    assert diagonal_formula_tau(4, p) == pytest.approx(expected_tau, rel=1e-14)
    assert diagonal_formula_tau_p(4, p) == pytest.approx((25.0 / 12.0) ** 0.25, rel=1e-14)


def test_diagonal_formula_vectors_are_cumulative():
    p = 1.5
    vals = diagonal_formula_tau_values(50, p)
    valsp = diagonal_formula_tau_p_values(50, p)
    assert np.all(np.diff(vals) > 0)
    assert np.all(np.diff(valsp) > 0)
    assert vals[-1] == diagonal_formula_tau(50, p)
    assert valsp[-1] == diagonal_formula_tau_p(50, p)
    assert vals[2] == pytest.approx(diagonal_formula_tau(3, p), rel=1e-14)


@pytest.mark.parametrize("p", [1.2, 4.0 / 3.0, 1.8])
def test_diagonal_formula_growth_bounds(p):
    # integral comparison gives tau(n) <= (2/p - 1)^(-1/2) n^(1/p - 1/2);
    # the harmonic closed form dominates (1/2)(1 + ln n)^(1/p')
    n = 2000
    q = conjugate_exponent(p)
    ns = np.arange(1, n + 1, dtype=float)
    tau_vals = diagonal_formula_tau_values(n, p)
    cap = (2.0 / p - 1.0) ** -0.5 * ns ** (1.0 / p - 0.5)
    assert np.all(tau_vals <= cap * (1 + 1e-12))
    taup_vals = diagonal_formula_tau_p_values(n, p)
    floor = 0.5 * (1.0 + np.log(ns)) ** (1.0 / q)
    assert np.all(taup_vals >= floor)


def test_diagonal_formula_domain_errors():
    for bad_p in (1.0, 2.0, 2.5, 0.8):
        with pytest.raises(DomainError):
            diagonal_formula_tau(3, bad_p)
        with pytest.raises(DomainError):
            diagonal_formula_tau_p(3, bad_p)
    with pytest.raises(DomainError):
        diagonal_formula_tau(0, 1.5)


# ---------------------------------------------------------------------------
# tau_estimate


def test_tau_estimate_identity_hilbert():
    T = OperatorSpec.identity(NormedSpaceSpec(3, Norm.L2))
    est = tau_estimate(T, {(1, 1), (2, 2), (3, 3)})
    assert est.lower_bound == pytest.approx(1.0, abs=1e-9)
    assert est.method is EstimateMethod.POWER_ITERATION


def test_tau_estimate_dense_hilbert_frozen():
    l2 = NormedSpaceSpec(2, Norm.L2)
    T = OperatorSpec.dense([[2.0, 0.0], [0.0, 1.0]], l2, l2)
    est = tau_estimate(T, full_tree(2))
    assert est.lower_bound == pytest.approx(2.0, abs=1e-9)


def test_tau_estimate_hilbert_matches_svd_oracle():
    rng = np.random.default_rng(41)
    for _ in range(5):
        M = rng.standard_normal((4, 3))
        T = OperatorSpec.dense(M, NormedSpaceSpec(3, Norm.L2), NormedSpaceSpec(4, Norm.L2))
        est = tau_estimate(T, full_tree(2), seed=int(rng.integers(1 << 30)))
        top = float(np.linalg.svd(M, compute_uv=False)[0])
        assert est.lower_bound == pytest.approx(top, abs=1e-8)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_tau_estimate_diagonal_example_exact(n):
    p = 4.0 / 3.0
    T = example_diagonal(n, p)
    est = tau_estimate(T, full_tree(n), restarts=3, iterations=40)
    formula = diagonal_formula_tau(n, p)
    # the paper states equality here, so the optimizer must land on the
    # closed form from below
    assert est.lower_bound == pytest.approx(formula, rel=1e-9)
    assert est.lower_bound <= formula * (1 + 1e-9)


def test_tau_estimate_witness_reproducible_and_normalized():
    T = example_diagonal(3, 1.5)
    est = tau_estimate(T, full_tree(3), restarts=2, iterations=30, seed=5)
    assert tau_ratio(T, est.best_witness) == pytest.approx(est.lower_bound, rel=1e-9)
    assert est.best_witness.squared_sum(T.domain.norm_of) == pytest.approx(1.0, rel=1e-12)


def test_tau_estimate_identity_l1_reaches_sqrt_n():
    for n in (2, 3):
        space = NormedSpaceSpec(n, Norm.L1)
        est = tau_estimate(OperatorSpec.identity(space), full_tree(n), restarts=2, iterations=30)
        assert est.lower_bound >= math.sqrt(n) * (1 - 1e-9)


def test_tau_estimate_linf_codomain_at_least_column_norm():
    sigma = np.array([0.3, 1.7, 0.9])
    T = OperatorSpec(
        "diagonal",
        NormedSpaceSpec(3, Norm.L1),
        NormedSpaceSpec(3, Norm.LINF),
        entries=sigma,
    )
    est = tau_estimate(T, full_tree(2), restarts=3, iterations=40)
    assert est.lower_bound >= 1.7 * (1 - 1e-9)
    assert tau_ratio(T, est.best_witness) == pytest.approx(est.lower_bound, rel=1e-9)


def test_tau_estimate_monotone_under_tree_inclusion():
    T = example_diagonal(3, 4.0 / 3.0)
    small = tau_estimate(T, full_tree(2), restarts=2, iterations=30).lower_bound
    large = tau_estimate(T, full_tree(3), restarts=2, iterations=30).lower_bound
    assert small <= large * (1 + 1e-9)


def test_tau_estimate_validation_errors():
    T = example_diagonal(2, 1.5)
    with pytest.raises(DomainError):
        tau_estimate(T, set())
    with pytest.raises(DomainError):
        tau_estimate(T, {(1, 1)}, restarts=0)
    with pytest.raises(DomainError):
        tau_estimate(T, {(1, 1)}, iterations=0)
    with pytest.raises(DomainError):
        tau_estimate(T, {(1, 2)})


# ---------------------------------------------------------------------------
# tau_p_estimate


def test_tau_p_estimate_identity_hilbert_p2():
    T = OperatorSpec.identity(NormedSpaceSpec(3, Norm.L2))
    est = tau_p_estimate(T, 3, 2.0)
    assert est.lower_bound == pytest.approx(1.0, abs=1e-9)
    assert est.method is EstimateMethod.POWER_ITERATION


@pytest.mark.parametrize("n", [2, 3, 4])
def test_tau_p_estimate_diagonal_example_exact(n):
    p = 4.0 / 3.0
    T = example_diagonal(n, p)
    est = tau_p_estimate(T, n, p, restarts=3, iterations=40)
    formula = diagonal_formula_tau_p(n, p)
    assert est.lower_bound == pytest.approx(formula, rel=1e-9)
    assert est.lower_bound <= formula * (1 + 1e-9)


def test_tau_p_estimate_witness_reproducible():
    p = 1.5
    T = example_diagonal(3, p)
    est = tau_p_estimate(T, 3, p, restarts=2, iterations=30, seed=2)
    assert tau_p_ratio(T, est.best_witness, p) == pytest.approx(est.lower_bound, rel=1e-9)


def test_tau_p_estimate_p1_concentrates_on_largest_entry():
    sigma = np.array([0.4, 1.3, 0.8])
    T = OperatorSpec.diagonal(sigma, Norm.L1)
    est = tau_p_estimate(T, 3, 1.0, restarts=2, iterations=30)
    assert est.lower_bound >= 1.3 * (1 - 1e-9)


def test_tau_p_estimate_validation_errors():
    T = example_diagonal(2, 1.5)
    with pytest.raises(DomainError):
        tau_p_estimate(T, 0, 1.5)
    with pytest.raises(DomainError):
        tau_p_estimate(T, 2, 2.5)
    with pytest.raises(DomainError):
        tau_p_estimate(T, 2, 1.5, restarts=0)


# ---------------------------------------------------------------------------
# structural checks


def test_comparison_check_identity_hilbert():
    T = OperatorSpec.identity(NormedSpaceSpec(2, Norm.L2))
    report = comparison_check(T, {(1, 1), (3, 2), (4, 5)}, restarts=2, iterations=30)
    assert report["passed"]
    assert report["setEstimate"]["lowerBound"] == pytest.approx(1.0, abs=1e-9)
    assert report["treeEstimate"]["lowerBound"] == pytest.approx(1.0, abs=1e-9)
    assert report["residuals"]["l2"] < 1e-9
    assert report["residuals"]["squareSum"] < 1e-9


def test_comparison_check_diagonal_pair():
    T = example_diagonal(4, 4.0 / 3.0, dim=5)
    report = comparison_check(T, {(1, 1), (2, 1)}, restarts=3, iterations=40)
    assert report["localHeight"] == 2
    assert (
        report["setEstimate"]["lowerBound"]
        <= report["treeEstimate"]["lowerBound"] + 1e-6
    )
    assert report["passed"]


def test_comparison_check_exact_height_sets_agree():
    rng = np.random.default_rng(55)
    T = example_diagonal(4, 4.0 / 3.0, dim=6)
    for _ in range(3):
        F = random_exact_height_set(rng, 2, 3)
        report = comparison_check(T, F, restarts=3, iterations=40)
        a = report["setEstimate"]["lowerBound"]
        b = report["treeEstimate"]["lowerBound"]
        assert abs(a - b) <= 0.02 * b
        assert report["passed"]


def test_monotonicity_check_diagonal():
    T = example_diagonal(4, 4.0 / 3.0, dim=6)
    report = monotonicity_check(T, 1, 3, restarts=3, iterations=40)
    assert report["passed"]
    names = [c["name"] for c in report["checks"]]
    assert names == ["shift-monotonicity", "band-domination", "band-equality"]


def test_monotonicity_check_rejects_bad_band():
    T = example_diagonal(2, 1.5)
    with pytest.raises(DomainError):
        monotonicity_check(T, 3, 2)


def test_triangle_chain_check_random_families():
    rng = np.random.default_rng(77)
    p = 4.0 / 3.0
    T = example_diagonal(6, p, dim=6)
    for _ in range(5):
        f = random_combination(rng, full_tree(4), 6)
        report = triangle_chain_check(T, f, p)
        assert report["passed"], report
        assert report["directNorm"] <= report["pieceNormSum"] + 1e-9


def test_triangle_chain_check_zero_combination():
    T = example_diagonal(3, 1.5)
    z = HaarCombination(3, {(1, 1): np.zeros(3)})
    report = triangle_chain_check(T, z, 1.5)
    assert report["passed"]
    assert report["pieceCount"] == 0


def test_apply_operator_maps_coefficients():
    T = OperatorSpec.diagonal([2.0, 3.0], Norm.L1)
    f = HaarCombination(2, {(1, 1): [1.0, -1.0]})
    g = apply_operator(T, f)
    assert np.array_equal(g.coefficient((1, 1)), [2.0, -3.0])
    with pytest.raises(DomainError):
        apply_operator(T, HaarCombination(3, {(1, 1): [1.0, 0.0, 0.0]}))
