"""Longstaff-Schwartz least-squares Monte Carlo with conditioning diagnostics."""

from .basis import BasisSet, DesignMatrix, design_matrix, evaluate_basis
from .errors import (
    InsufficientDataError,
    InvalidArgumentError,
    LsmError,
    RankDeficientError,
    SingularSystemError,
    SolverError,
)
from .lsm import (
    Payoff,
    PriceEstimate,
    RatePlan,
    discount_factor,
    european_price,
    lsm_price,
    payoff_value,
)
from .paths import PathSet, SdeModel, TimeGrid, build_time_grid, simulate
from .regress import (
    LsSolution,
    condition_number,
    gram_at_zero,
    singular_values,
    solve,
    solve_normal_equations,
    solve_qr,
    solve_svd,
)
from .stability import (
    ConditionScan,
    SlopeFit,
    fit_loglog_slope,
    reproduce_figure,
    scan_condition_numbers,
    spearman_trend,
    verify_proposition_one,
)

__all__ = [
    "BasisSet",
    "ConditionScan",
    "DesignMatrix",
    "InsufficientDataError",
    "InvalidArgumentError",
    "LsSolution",
    "LsmError",
    "PathSet",
    "Payoff",
    "PriceEstimate",
    "RankDeficientError",
    "RatePlan",
    "SdeModel",
    "SingularSystemError",
    "SlopeFit",
    "SolverError",
    "TimeGrid",
    "build_time_grid",
    "condition_number",
    "design_matrix",
    "discount_factor",
    "european_price",
    "evaluate_basis",
    "fit_loglog_slope",
    "gram_at_zero",
    "lsm_price",
    "payoff_value",
    "reproduce_figure",
    "scan_condition_numbers",
    "simulate",
    "singular_values",
    "solve",
    "solve_normal_equations",
    "solve_qr",
    "solve_svd",
    "spearman_trend",
    "verify_proposition_one",
]
