"""Heisenberg-group calculus, degenerate fully nonlinear operators on H^1,
a monotone grid solver for F(D^{2,*}u) - c u = f, and Holder-regularity
measurement, with a seeded verification suite for every matrix lemma."""

from .calculus import full_hessian, h_gradient, h_hessian, lift, sublaplacian
from .doubling import (
    MaxReport,
    PenaltyParams,
    TraceGapReport,
    block_gap,
    doubling_certificate,
    lifted_trace_gap,
    make_admissible_pair,
    n_matrix,
    penalty_hessian,
    penalty_hessian_sq,
    penalty_value,
    psd_sandwich_check,
    sqrtp_ratio,
    trace_gap,
    vertical_obstruction_check,
)
from .fields import NumericField, PolynomialField, ScalarField, parse_polynomial
from .grid import Grid3, GridFunction
from .group import ORIGIN, Point, dilate, frame, group_inv, group_mul, p_matrix, sigma, sqrt_p
from .operators import (
    EllipticityBracket,
    HolderData,
    OperatorSpec,
    eval_intrinsic,
    eval_lifted,
    pucci_minus,
    pucci_plus,
    residual,
    validate_operator,
)
from .regularity import (
    HolderReport,
    check_theorem,
    fit_alpha,
    holder_seminorm,
    modulus,
    theorem_bound,
)
from .solver import (
    ProblemSpec,
    SolveResult,
    manufacture,
    residual_norm,
    solve,
    stencil_hessian,
    step,
)
from .symmetric import Mat2x3, Sym2, Sym3

__version__ = "0.1.0"

__all__ = [
    "ORIGIN",
    "EllipticityBracket",
    "Grid3",
    "GridFunction",
    "HolderData",
    "HolderReport",
    "Mat2x3",
    "MaxReport",
    "NumericField",
    "OperatorSpec",
    "PenaltyParams",
    "Point",
    "PolynomialField",
    "ProblemSpec",
    "ScalarField",
    "SolveResult",
    "Sym2",
    "Sym3",
    "TraceGapReport",
    "block_gap",
    "check_theorem",
    "dilate",
    "doubling_certificate",
    "eval_intrinsic",
    "eval_lifted",
    "fit_alpha",
    "frame",
    "full_hessian",
    "group_inv",
    "group_mul",
    "h_gradient",
    "h_hessian",
    "holder_seminorm",
    "lift",
    "lifted_trace_gap",
    "make_admissible_pair",
    "manufacture",
    "modulus",
    "n_matrix",
    "p_matrix",
    "parse_polynomial",
    "penalty_hessian",
    "penalty_hessian_sq",
    "penalty_value",
    "psd_sandwich_check",
    "pucci_minus",
    "pucci_plus",
    "residual",
    "residual_norm",
    "sigma",
    "solve",
    "sqrt_p",
    "sqrtp_ratio",
    "stencil_hessian",
    "step",
    "sublaplacian",
    "theorem_bound",
    "trace_gap",
    "validate_operator",
    "vertical_obstruction_check",
]
