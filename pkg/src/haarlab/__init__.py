"""Dyadic Haar system toolkit.

Exact evaluation of the Haar basis at dyadic rationals, measure-preserving
quarter-swap transforms with index-set compression, branch combinatorics
(local height, filling, weight partitions), and lower estimation of the
vector-valued type constants tau and tau_p with closed forms for the
standard diagonal example.
"""

from .combination import HaarCombination
from .combinatorics import (
    GreedyFamily,
    PartitionFamily,
    band_weight_bound,
    exact_local_height,
    fill_one,
    fill_to_height,
    greedy_family,
    level_set_partition,
    local_height,
    threshold_base,
)
from .config import DEFAULT_MAX_LEVEL, max_level
from .dyadic import (
    DyadicInterval,
    DyadicRational,
    HaarIndex,
    HaarValue,
    branch,
    check_haar_index,
    dyadic_band,
    full_tree,
    haar_eval,
    haar_sign_table,
    half_power,
    make_index_set,
    scaling_identity_check,
    support,
    translation_identity_check,
)
from .errors import DomainError, HaarLabError, PreconditionError, SchemaError
from .experiments import (
    ExperimentConfig,
    ExperimentReport,
    run_comparison_experiment,
    run_log_variant_experiment,
    run_verify,
    run_weak_type_sweep,
)
from .normlab import (
    EstimateMethod,
    TauEstimate,
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
from .spaces import Norm, NormedSpaceSpec, OperatorKind, OperatorSpec
from .transforms import (
    CompressionTrace,
    FateKind,
    ForkTransform,
    IndexFate,
    classify_index,
    compress,
    fork_members,
    fork_relations_hold,
    fork_split,
    index_image,
    is_admissible,
    rewrite_combination,
    swap_point,
    swapped_quarters,
)

__version__ = "0.1.0"

__all__ = [
    "HaarCombination",
    "GreedyFamily",
    "PartitionFamily",
    "band_weight_bound",
    "exact_local_height",
    "fill_one",
    "fill_to_height",
    "greedy_family",
    "level_set_partition",
    "local_height",
    "threshold_base",
    "DEFAULT_MAX_LEVEL",
    "max_level",
    "DyadicInterval",
    "DyadicRational",
    "HaarIndex",
    "HaarValue",
    "branch",
    "check_haar_index",
    "dyadic_band",
    "full_tree",
    "haar_eval",
    "haar_sign_table",
    "half_power",
    "make_index_set",
    "scaling_identity_check",
    "support",
    "translation_identity_check",
    "DomainError",
    "HaarLabError",
    "PreconditionError",
    "SchemaError",
    "ExperimentConfig",
    "ExperimentReport",
    "run_comparison_experiment",
    "run_log_variant_experiment",
    "run_verify",
    "run_weak_type_sweep",
    "EstimateMethod",
    "TauEstimate",
    "apply_operator",
    "comparison_check",
    "conjugate_exponent",
    "diagonal_formula_tau",
    "diagonal_formula_tau_p",
    "diagonal_formula_tau_p_values",
    "diagonal_formula_tau_values",
    "levelwise_rhs_p",
    "lp_norm_of_combination",
    "monotonicity_check",
    "tau_estimate",
    "tau_p_estimate",
    "tau_p_ratio",
    "tau_ratio",
    "triangle_chain_check",
    "Norm",
    "NormedSpaceSpec",
    "OperatorKind",
    "OperatorSpec",
    "CompressionTrace",
    "FateKind",
    "ForkTransform",
    "IndexFate",
    "classify_index",
    "compress",
    "fork_members",
    "fork_relations_hold",
    "fork_split",
    "index_image",
    "is_admissible",
    "rewrite_combination",
    "swap_point",
    "swapped_quarters",
]
