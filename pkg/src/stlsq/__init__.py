"""Sequentially thresholded least squares with convergence diagnostics."""

from stlsq.kernels import BACKEND
from stlsq.numkernel import (
    PowerIterationError,
    RankDeficientError,
    column_rank_full,
    pseudo_inverse_apply,
    restricted_least_squares,
    spectral_norm,
)
from stlsq.solver import (
    IterationTrace,
    SolverError,
    SolverParams,
    SparseSolution,
    brute_force_global_min,
    check_global_min_conditions,
    check_one_step_condition,
    is_fixed_point,
    objective_value,
    sindy_solve,
    sindy_solve_many,
    stridge_solve,
    surrogate_value,
    threshold_support,
)

__all__ = [
    "BACKEND",
    "IterationTrace",
    "PowerIterationError",
    "RankDeficientError",
    "SolverError",
    "SolverParams",
    "SparseSolution",
    "brute_force_global_min",
    "check_global_min_conditions",
    "check_one_step_condition",
    "column_rank_full",
    "is_fixed_point",
    "objective_value",
    "pseudo_inverse_apply",
    "restricted_least_squares",
    "sindy_solve",
    "sindy_solve_many",
    "spectral_norm",
    "stridge_solve",
    "surrogate_value",
    "threshold_support",
]
