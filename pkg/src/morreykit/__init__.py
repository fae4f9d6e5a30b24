"""morreykit: numerical verification of weighted local averaging estimates.

Sampled functions on uniform grids, Muckenhoupt-style weight diagnostics,
generalized weighted Morrey norms (strong and weak), maximal / fractional /
singular integral operators with exact small-scale quadrature, sufficient-
condition checkers for shape-function pairs, and a reproducible experiment
harness with deterministic reports.
"""

from .grid import (
    Ball,
    BallFamily,
    BallMassEvaluator,
    ConfigurationError,
    CumulativeMass,
    Domain,
    SampledFunction,
    ball_family,
    ball_integral,
    ball_mass,
    ball_volume,
    family_from_points,
    geometric_ladder,
    make_domain,
    overlap_measures,
    sample,
)
from .weights import (
    ConstantEstimate,
    Weight,
    ap_constant,
    ap_product,
    apq_constant,
    apq_product,
    constant_weight,
    detect_divergence,
    doubling_check,
    power_weight,
    power_weight_in_class,
    scale_weight,
    weight_from_samples,
    weight_power,
    weighted_measure,
)
from .norms import (
    NormResult,
    PsiFunction,
    classical_morrey_norm,
    gw_morrey_norm,
    gw_weak_morrey_norm,
    psi_catalog,
    weighted_lp_norm,
    weighted_weak_lp_norm,
)
from .operators import (
    DominationReport,
    KernelCheckReport,
    KernelSpec,
    cz_apply,
    cz_at,
    fractional_maximal,
    hl_maximal,
    kernel,
    kernel_from_expression,
    kernel_names,
    maximal_at,
    maximal_defined_mask,
    maximal_potential_domination,
    register_kernel,
    riesz_at,
    riesz_potential,
    standard_kernel_check,
)
from .hypotheses import (
    ConditionEstimate,
    MonotoneComparisonReport,
    average_vs_norm_verify,
    condition_ladder,
    integral_condition_constant,
    log_grid,
    monotone_comparison_verify,
    sup_condition_constant,
    tail_bound_verify,
    weighted_integral_condition_constant,
)
from .harness import (
    FUNCTION_NAMES,
    OPERATORS,
    DomainSpec,
    ExperimentConfig,
    ExperimentReport,
    FamilySpec,
    FunctionFamilySpec,
    PsiSpec,
    WeightSpec,
    boundedness_experiment,
    build_function_family,
    local_estimate_experiment,
    local_pair_value,
    refinement_study,
    run_experiment,
    validate_config,
)
from .report import (
    canonical_json,
    config_hash,
    render_summary,
    report_to_dict,
    write_report,
)
from .cli import RunSpec, main, parse_run_spec, serialize_run_spec

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # grid
    "Ball",
    "BallFamily",
    "BallMassEvaluator",
    "ConfigurationError",
    "CumulativeMass",
    "Domain",
    "SampledFunction",
    "ball_family",
    "ball_integral",
    "ball_mass",
    "ball_volume",
    "family_from_points",
    "geometric_ladder",
    "make_domain",
    "overlap_measures",
    "sample",
    # weights
    "ConstantEstimate",
    "Weight",
    "ap_constant",
    "ap_product",
    "apq_constant",
    "apq_product",
    "constant_weight",
    "detect_divergence",
    "doubling_check",
    "power_weight",
    "power_weight_in_class",
    "scale_weight",
    "weight_from_samples",
    "weight_power",
    "weighted_measure",
    # norms
    "NormResult",
    "PsiFunction",
    "classical_morrey_norm",
    "gw_morrey_norm",
    "gw_weak_morrey_norm",
    "psi_catalog",
    "weighted_lp_norm",
    "weighted_weak_lp_norm",
    # operators
    "DominationReport",
    "KernelCheckReport",
    "KernelSpec",
    "cz_apply",
    "cz_at",
    "fractional_maximal",
    "hl_maximal",
    "kernel",
    "kernel_from_expression",
    "kernel_names",
    "maximal_at",
    "maximal_defined_mask",
    "maximal_potential_domination",
    "register_kernel",
    "riesz_at",
    "riesz_potential",
    "standard_kernel_check",
    # hypotheses
    "ConditionEstimate",
    "MonotoneComparisonReport",
    "average_vs_norm_verify",
    "condition_ladder",
    "integral_condition_constant",
    "log_grid",
    "monotone_comparison_verify",
    "sup_condition_constant",
    "tail_bound_verify",
    "weighted_integral_condition_constant",
    # harness
    "FUNCTION_NAMES",
    "OPERATORS",
    "DomainSpec",
    "ExperimentConfig",
    "ExperimentReport",
    "FamilySpec",
    "FunctionFamilySpec",
    "PsiSpec",
    "WeightSpec",
    "boundedness_experiment",
    "build_function_family",
    "local_estimate_experiment",
    "local_pair_value",
    "refinement_study",
    "run_experiment",
    "validate_config",
    # report
    "canonical_json",
    "config_hash",
    "render_summary",
    "report_to_dict",
    "write_report",
    # cli
    "RunSpec",
    "main",
    "parse_run_spec",
    "serialize_run_spec",
]
