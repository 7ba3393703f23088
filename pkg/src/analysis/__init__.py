"""
Generating functions of fully packed trees and their analysis: series
solutions, the parametrization identities, phase classification,
coefficient asymptotics and the scaling function I_alpha.
"""

from .asymptotics import (
    REGIMES,
    AsymptoticConstants,
    ComparisonResult,
    Exponents,
    Fp_at_xc,
    G_series,
    constants,
    predict_and_compare,
    universal_exponents,
    xderiv_series,
)
from .genfun import (
    ParametrizationBundle,
    ParametrizationEvaluator,
    build_parametrization,
    default_backend,
    f0_series,
    fhat_series,
    lagrange_coefficients,
    slice_series,
    solve_functional_equation,
    solve_Yhat,
)
from .identities import (
    ConsistencyReport,
    IdentityCheck,
    IdentityReport,
    consistency_compose,
    identity_suite,
    lagrange_check,
    require_identities,
)
from .phase import (
    DENSE,
    DENSE_OUT_OF_SCOPE,
    DILUTE,
    DILUTE_MINUS,
    GENERIC,
    GENERIC_PLUS,
    CriterionResult,
    PhaseReport,
    TuningResult,
    classify,
    count_sign_changes,
    find_Yc_xc,
    probabilistic_criterion,
    tune_b0_to_dilute,
    tune_to_dilute,
)
from .scaling import H_alpha, ScalingFunctionEvaluator

__all__ = [
    # genfun
    "default_backend",
    "solve_functional_equation",
    "ParametrizationBundle",
    "build_parametrization",
    "lagrange_coefficients",
    "fhat_series",
    "solve_Yhat",
    "f0_series",
    "slice_series",
    "ParametrizationEvaluator",
    # identities
    "IdentityCheck",
    "IdentityReport",
    "identity_suite",
    "require_identities",
    "ConsistencyReport",
    "consistency_compose",
    "lagrange_check",
    # phase
    "GENERIC",
    "DILUTE",
    "DENSE",
    "GENERIC_PLUS",
    "DILUTE_MINUS",
    "DENSE_OUT_OF_SCOPE",
    "PhaseReport",
    "classify",
    "find_Yc_xc",
    "count_sign_changes",
    "CriterionResult",
    "probabilistic_criterion",
    "TuningResult",
    "tune_to_dilute",
    "tune_b0_to_dilute",
    # asymptotics
    "REGIMES",
    "Exponents",
    "universal_exponents",
    "AsymptoticConstants",
    "constants",
    "Fp_at_xc",
    "xderiv_series",
    "G_series",
    "ComparisonResult",
    "predict_and_compare",
    # scaling
    "ScalingFunctionEvaluator",
    "H_alpha",
]
