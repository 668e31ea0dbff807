"""Simultaneous extraction of all roots, with known multiplicities, of
generalized polynomials over Chebyshev systems."""

from .analysis import (
    OrderEstimate,
    check_derivative_congruence,
    estimate_order,
    eval_phi,
    eval_psi,
    finite_difference_derivative,
    richardson_derivative,
    write_diagnostics_csv,
)
from .basis import (
    BasisFunction,
    BasisSystem,
    Jet,
    constant,
    cosine,
    eval_basis,
    exponential,
    expression,
    inverse_quadratic,
    jet_propagate,
    make_reference_basis,
    parse_expression,
    power,
    sine,
)
from .confluent import (
    ConfluentMatrix,
    RootConfiguration,
    build_matrix,
    coefficients_from_roots,
    determinant,
    first_row_cofactors,
    hadamard_bound,
    q_derivative,
    q_value,
)
from .errors import (
    DegenerateDenominator,
    DimensionMismatch,
    DivisionBySingularJet,
    DomainError,
    ExpressionParseError,
    InsufficientHistory,
    InvalidConfiguration,
    IterateCollision,
    OrderExceedsCap,
    ProblemFileError,
    SimrootsError,
    SingularNodeSystem,
)
from .genpoly import GeneralizedPolynomial, from_roots, residual_profile
from .solver import (
    IterationState,
    SolveReport,
    SolveStatus,
    SolverSettings,
    ehrlich_step,
    is_monomial_basis,
    method3_denominator,
    monomial_shortcut,
    parallel_corrections,
    single_correction,
    solve,
    step_method3,
    step_method13,
)

__version__ = "0.1.0"

__all__ = [
    "BasisFunction",
    "BasisSystem",
    "ConfluentMatrix",
    "DegenerateDenominator",
    "DimensionMismatch",
    "DivisionBySingularJet",
    "DomainError",
    "ExpressionParseError",
    "GeneralizedPolynomial",
    "InsufficientHistory",
    "InvalidConfiguration",
    "IterateCollision",
    "IterationState",
    "Jet",
    "OrderEstimate",
    "OrderExceedsCap",
    "ProblemFileError",
    "RootConfiguration",
    "SimrootsError",
    "SingularNodeSystem",
    "SolveReport",
    "SolveStatus",
    "SolverSettings",
    "build_matrix",
    "check_derivative_congruence",
    "coefficients_from_roots",
    "constant",
    "cosine",
    "determinant",
    "ehrlich_step",
    "estimate_order",
    "eval_basis",
    "eval_phi",
    "eval_psi",
    "exponential",
    "expression",
    "finite_difference_derivative",
    "first_row_cofactors",
    "from_roots",
    "hadamard_bound",
    "inverse_quadratic",
    "is_monomial_basis",
    "jet_propagate",
    "make_reference_basis",
    "method3_denominator",
    "monomial_shortcut",
    "parallel_corrections",
    "parse_expression",
    "power",
    "q_derivative",
    "q_value",
    "residual_profile",
    "richardson_derivative",
    "sine",
    "single_correction",
    "solve",
    "step_method3",
    "step_method13",
    "write_diagnostics_csv",
    "__version__",
]
