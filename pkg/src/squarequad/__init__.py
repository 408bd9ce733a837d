"""Cubature on the square with paired error-bracketing rules, and a
weighted Nystrom solver for second-kind integral equations built on them."""

from .cubature import (
    BracketingReport,
    CubatureRule2D,
    antigauss_cubature,
    averaged_cubature,
    bracketing_diagnostic,
    chebyshev_bracketing_terms,
    error_estimate,
    gauss_cubature,
)
from .errors import AssemblyError, CapacityError, ConvergenceError, EvaluationError
from .fredholm import (
    FredholmProblem,
    NystromSolution,
    SpaceWeight,
    assemble_system,
    averaged_interpolant,
    bracketing_check,
    condition_number_inf,
    interpolant_eval,
    relative_error,
    solve_nystrom,
)
from .linsolve import KrylovStats, SystemOperator, fold, gmres, lu_solve, stein_solve, unfold
from .orthopoly import JacobiWeight, RecurrenceCoeffs, eval_orthonormal, recurrence_coeffs
from .rules import QuadRule1D, antigauss_rule, gauss_rule, nodes_contained
from .tridiag import eig_tridiag

__version__ = "0.1.0"

__all__ = [
    "AssemblyError",
    "BracketingReport",
    "CapacityError",
    "ConvergenceError",
    "CubatureRule2D",
    "EvaluationError",
    "FredholmProblem",
    "JacobiWeight",
    "KrylovStats",
    "NystromSolution",
    "QuadRule1D",
    "RecurrenceCoeffs",
    "SpaceWeight",
    "SystemOperator",
    "antigauss_cubature",
    "antigauss_rule",
    "assemble_system",
    "averaged_cubature",
    "averaged_interpolant",
    "bracketing_check",
    "bracketing_diagnostic",
    "chebyshev_bracketing_terms",
    "condition_number_inf",
    "eig_tridiag",
    "error_estimate",
    "eval_orthonormal",
    "fold",
    "gauss_cubature",
    "gauss_rule",
    "gmres",
    "interpolant_eval",
    "lu_solve",
    "nodes_contained",
    "recurrence_coeffs",
    "relative_error",
    "solve_nystrom",
    "stein_solve",
    "unfold",
]
