"""Condition-number scans over exercise dates and the t -> 0 blow-up.

At t = 0 every path sits at x0, so the design matrix has N identical rows and
rank one. As t grows the rows spread out; for polynomial bases of degree K-1
the smallest singular value shrinks like (sigma**2 t)**((K-1)/2) relative to
the largest, so for K = 3 the condition number behaves like 1/t near zero.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .basis import BasisSet, Family, basis_values, design_matrix
from .errors import InsufficientDataError, InvalidArgumentError
from .paths import ModelKind, PathSet, Scheme, SdeModel, TimeGrid, simulate
from .regress import condition_number, default_rank_tolerance, gram_at_zero, singular_values

CSV_HEADER = ["t", "kappa", "ln_t", "ln_kappa", "is_infinite"]


@dataclass(frozen=True, eq=False)
class ConditionScan:
    """kappa(t_m) at the interior dates m = 1..M-1."""

    times: np.ndarray
    kappas: np.ndarray
    config_digest: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.times.tolist(), self.kappas.tolist()))

    def window(self, t_lo: float, t_hi: float) -> "ConditionScan":
        """Points with t_lo < t <= t_hi."""
        mask = (self.times > t_lo) & (self.times <= t_hi)
        return ConditionScan(self.times[mask], self.kappas[mask], self.config_digest)

    def kappa_at(self, t: float) -> float:
        idx = int(np.argmin(np.abs(self.times - t)))
        return float(self.kappas[idx])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for t, kappa in zip(self.times.tolist(), self.kappas.tolist()):
            if math.isinf(kappa):
                writer.writerow([repr(t), "", repr(math.log(t)), "", "true"])
            else:
                writer.writerow([repr(t), repr(kappa), repr(math.log(t)), repr(math.log(kappa)), "false"])
        return buf.getvalue()


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    t_window: tuple[float, float]
    points_used: int


def scan_condition_numbers(pathset: PathSet, basis: BasisSet, config_digest: dict | None = None) -> ConditionScan:
    M = pathset.grid.M
    times = np.array([pathset.grid.time(m) for m in range(1, M)])
    kappas = np.array([condition_number(design_matrix(basis, pathset, m)) for m in range(1, M)])
    return ConditionScan(times, kappas, dict(config_digest or {}))


def _finite_window(scan: ConditionScan, t_window) -> tuple[np.ndarray, np.ndarray]:
    t_lo, t_hi = t_window
    sub = scan.window(t_lo, t_hi)
    ok = np.isfinite(sub.kappas)
    return sub.times[ok], sub.kappas[ok]


def fit_loglog_slope(scan: ConditionScan, t_window=(0.009, 0.2)) -> SlopeFit:
    """Ordinary least squares of ln kappa on ln t over finite points in ``(t_lo, t_hi]``."""
    t, kappa = _finite_window(scan, t_window)
    if len(t) < 2:
        raise InsufficientDataError(
            f"need at least 2 finite condition numbers in window {tuple(t_window)}, found {len(t)}"
        )
    slope, intercept = np.polyfit(np.log(t), np.log(kappa), 1)
    return SlopeFit(float(slope), float(intercept), (float(t_window[0]), float(t_window[1])), len(t))


def spearman_trend(scan: ConditionScan, t_window=(0.009, 0.2)) -> float:
    """Spearman rank correlation of ln kappa against ln t (monotone, so same as kappa vs t)."""
    t, kappa = _finite_window(scan, t_window)
    if len(t) < 2:
        raise InsufficientDataError(
            f"need at least 2 finite condition numbers in window {tuple(t_window)}, found {len(t)}"
        )
    return float(stats.spearmanr(np.log(t), np.log(kappa)).statistic)


@dataclass(frozen=True)
class PropositionReport:
    basis: BasisSet
    x0: float
    N: int
    rank: int
    singular_values: np.ndarray
    expected_sigma: float
    kappa: float
    gram_eigenvalues: np.ndarray
    checks: dict

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def verify_proposition_one(basis: BasisSet, x0: float, N: int, rel_tol: float = 1e-10) -> PropositionReport:
    """Check the rank-one structure of the t = 0 design matrix against its closed form.

    With all N rows equal to f(x0), A has one nonzero singular value
    sqrt(N * |f(x0)|^2), the rest are zero, and A^T A / N = f(x0) f(x0)^T has
    eigenvalues |f(x0)|^2 (once) and 0 (K - 1 times).
    """
    if isinstance(N, bool) or int(N) != N or N < 1:
        raise InvalidArgumentError(f"N must be a positive integer, got {N}")
    gram = gram_at_zero(basis, x0)
    f = basis_values(basis, float(x0))
    sq_sum = float(f @ f)
    A = np.tile(f, (int(N), 1))
    s = singular_values(A)
    cutoff = default_rank_tolerance(A.shape) * s[0]
    rank = int(np.sum(s >= cutoff))
    expected = math.sqrt(N * sq_sum)
    kappa = condition_number(A)
    eig = np.sort(np.linalg.eigvalsh(gram))[::-1]
    K = basis.K
    checks = {
        "rank_is_one": rank == 1,
        "leading_singular_value": abs(s[0] - expected) <= rel_tol * expected,
        "trailing_singular_values_negligible": bool(np.all(s[1:] < cutoff)),
        "kappa": kappa == float("inf") if K > 1 else kappa == 1.0,
        "gram_eigenvalues": abs(eig[0] - sq_sum) <= rel_tol * sq_sum
        and bool(np.all(np.abs(eig[1:]) <= 1e-12 * sq_sum * K)),
    }
    return PropositionReport(basis, float(x0), int(N), rank, s, expected, kappa, eig, checks)


FIGURE_T_RANGE = (0.009, 1.0)

FIGURES = {
    "fig1": dict(
        model=SdeModel(ModelKind.LOGNORMAL, mu=0.0, sigma=0.15, x0=1.0),
        grid=TimeGrid(T=1.0, M=100),
        N=30000,
        scheme=Scheme.MILSTEIN,
        basis=BasisSet(Family.MONOMIAL, 3),
        seed=0,
    ),
    "fig2": dict(
        model=SdeModel(ModelKind.ARITHMETIC, mu=0.0, sigma=0.03, x0=1.0),
        grid=TimeGrid(T=1.0, M=100),
        N=30000,
        scheme=Scheme.EULER,
        basis=BasisSet(Family.MONOMIAL, 3),
        seed=0,
    ),
}


def figure_config(figure_id: str, overrides: dict | None = None) -> dict:
    key = str(figure_id).lower()
    if key not in FIGURES:
        raise InvalidArgumentError(f"unknown figure {figure_id!r}; expected one of {sorted(FIGURES)}")
    cfg = dict(FIGURES[key])
    for name, value in (overrides or {}).items():
        if name not in cfg:
            raise InvalidArgumentError(f"unknown figure override {name!r}")
        cfg[name] = value
    return cfg


def describe(cfg: dict) -> dict:
    model, grid, basis = cfg["model"], cfg["grid"], cfg["basis"]
    return {
        "kind": model.kind.value,
        "mu": model.mu,
        "sigma": model.sigma,
        "x0": model.x0,
        "T": grid.T,
        "M": grid.M,
        "N": cfg["N"],
        "scheme": Scheme(cfg["scheme"]).value,
        "basis": basis.family.value,
        "K": basis.K,
        "seed": cfg["seed"],
    }


def reproduce_figure(figure_id: str, overrides: dict | None = None, workers: int | None = None) -> ConditionScan:
    """Condition-number scan for one of the two published configurations.

    ``overrides`` may replace any of ``model``, ``grid``, ``N``, ``scheme``,
    ``basis`` or ``seed``.
    """
    cfg = figure_config(figure_id, overrides)
    pathset = simulate(cfg["model"], cfg["grid"], cfg["N"], cfg["scheme"], cfg["seed"], workers=workers)
    scan = scan_condition_numbers(pathset, cfg["basis"], describe(cfg))
    return scan.window(*FIGURE_T_RANGE)


__all__ = [
    "CSV_HEADER",
    "ConditionScan",
    "FIGURES",
    "PropositionReport",
    "SlopeFit",
    "describe",
    "figure_config",
    "fit_loglog_slope",
    "reproduce_figure",
    "scan_condition_numbers",
    "spearman_trend",
    "verify_proposition_one",
]
