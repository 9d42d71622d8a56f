"""Longstaff-Schwartz backward induction."""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .basis import BasisSet, basis_values, design_matrix
from .errors import InvalidArgumentError, SolverError
from .paths import PathSet
from .regress import Solver, solve

logger = logging.getLogger(__name__)


class PayoffKind(str, enum.Enum):
    PUT = "put"
    CALL = "call"


@dataclass(frozen=True)
class Payoff:
    kind: PayoffKind = PayoffKind.PUT
    strike: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", PayoffKind(self.kind))
        if not (np.isfinite(self.strike) and self.strike > 0):
            raise InvalidArgumentError(f"strike must be > 0, got {self.strike}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind is PayoffKind.PUT:
            return np.maximum(self.strike - x, 0.0)
        return np.maximum(x - self.strike, 0.0)


@dataclass(frozen=True)
class RatePlan:
    """Constant short rate ``r`` (per unit time)."""

    r: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.r) and self.r >= 0):
            raise InvalidArgumentError(f"r must be >= 0, got {self.r}")


@dataclass(frozen=True, eq=False)
class PriceEstimate:
    value: float
    standard_error: float
    per_date_kappa: np.ndarray
    exercised_at_zero: bool
    # undiscounted cash flow per path and the date index it is paid at
    cash_flows: np.ndarray | None = field(default=None, repr=False)
    exercise_dates: np.ndarray | None = field(default=None, repr=False)


def payoff_value(payoff: Payoff, x: float) -> float:
    x = float(x)
    if not np.isfinite(x):
        raise InvalidArgumentError(f"payoff argument must be finite, got {x}")
    return float(payoff(x))


def discount_factor(rate: RatePlan, t_a, t_b):
    """exp(-r (t_b - t_a)); accepts scalars or arrays."""
    t_a = np.asarray(t_a, dtype=float)
    t_b = np.asarray(t_b, dtype=float)
    if np.any(t_a > t_b):
        raise InvalidArgumentError("discounting needs t_a <= t_b")
    d = np.exp(-rate.r * (t_b - t_a))
    return float(d) if d.ndim == 0 else d


def _mean_and_se(pv: np.ndarray) -> tuple[float, float]:
    n = pv.shape[0]
    se = float(np.std(pv, ddof=1) / np.sqrt(n)) if n > 1 else 0.0
    # fsum keeps the average of identical cash flows exact
    return math.fsum(pv.tolist()) / n, se


def european_price(pathset: PathSet, payoff: Payoff, rate: RatePlan = RatePlan()) -> PriceEstimate:
    """Exercise only at maturity, estimated on the same paths."""
    grid = pathset.grid
    pv = payoff(pathset.values[:, -1]) * discount_factor(rate, 0.0, grid.T)
    value, se = _mean_and_se(np.asarray(pv, dtype=float))
    return PriceEstimate(value, se, np.empty(0), False)


def lsm_price(
    pathset: PathSet,
    payoff: Payoff,
    basis: BasisSet,
    rate: RatePlan = RatePlan(),
    solver: Solver | str = Solver.SVD,
    itm_only: bool = False,
    rank_tolerance: float | None = None,
) -> PriceEstimate:
    """Price a Bermudan option exercisable at every grid node.

    Each path carries a single cash flow and its payment date. At every interior
    date, walking backwards, the discounted cash flows are regressed on the
    basis evaluated at the current state; a path switches to immediate exercise
    only when its payoff strictly exceeds the fitted continuation value.

    ``per_date_kappa[m - 1]`` holds the condition number of the regression at
    date ``m`` (``nan`` if ``itm_only`` left no rows to regress).

    Raises :class:`SolverError` with ``date_index`` set when the normal
    equations or QR break down; the SVD route never does.
    """
    solver = Solver(solver)
    grid = pathset.grid
    X = pathset.values
    N, M = pathset.n_paths, grid.M
    if not itm_only and N < basis.K:
        raise InvalidArgumentError(f"need at least K={basis.K} paths to regress, got N={N}")
    times = grid.nodes

    amounts = np.asarray(payoff(X[:, M]), dtype=float).copy()
    dates = np.full(N, M)
    kappas = np.full(M - 1, np.nan)

    for m in range(M - 1, 0, -1):
        target = amounts * discount_factor(rate, times[m], times[dates])
        exercise_value = np.asarray(payoff(X[:, m]), dtype=float)
        rows = exercise_value > 0.0 if itm_only else None
        if rows is not None and not rows.any():
            continue
        A = design_matrix(basis, pathset, m, rows=rows)
        b = target if rows is None else target[rows]
        try:
            fit = solve(A, b, solver, rank_tolerance)
        except SolverError as exc:
            exc.date_index = m
            raise
        kappas[m - 1] = fit.kappa
        continuation = basis_values(basis, X[:, m]) @ fit.coefficients
        exercise = exercise_value > continuation
        if rows is not None:
            exercise &= rows
        amounts[exercise] = exercise_value[exercise]
        dates[exercise] = m
        logger.debug("date %d: kappa=%.4g exercised=%d", m, fit.kappa, int(exercise.sum()))

    pv = amounts * discount_factor(rate, 0.0, times[dates])
    continuation0, se = _mean_and_se(pv)
    immediate0 = payoff_value(payoff, pathset.x0)
    exercised_at_zero = immediate0 > continuation0
    value = immediate0 if exercised_at_zero else continuation0
    return PriceEstimate(value, se, kappas, exercised_at_zero, amounts, dates)
