"""Least-squares solvers for A x = b and conditioning diagnostics.

Three routes are offered so their sensitivity to ill-conditioning can be
compared: Cholesky on the normal equations (error grows like kappa**2),
Householder QR and truncated SVD (error grows like kappa). Only the SVD route
tolerates rank deficiency; it returns the minimum-norm solution.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .basis import BasisSet, basis_values
from .errors import InvalidArgumentError, RankDeficientError, SingularSystemError

EPS = np.finfo(float).eps


class Solver(str, enum.Enum):
    NORMAL = "normal"
    QR = "qr"
    SVD = "svd"


@dataclass(frozen=True, eq=False)
class LsSolution:
    coefficients: np.ndarray
    solver: Solver
    effective_rank: int
    kappa: float
    residual_norm: float


def _as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise InvalidArgumentError(f"expected a non-empty 2-D matrix, got shape {A.shape}")
    return A


def _as_rhs(A: np.ndarray, b) -> np.ndarray:
    b = np.asarray(b, dtype=float).reshape(-1)
    if b.shape[0] != A.shape[0]:
        raise InvalidArgumentError(f"right-hand side has length {b.shape[0]}, matrix has {A.shape[0]} rows")
    return b


def default_rank_tolerance(shape: tuple[int, int]) -> float:
    """Relative cutoff: singular values below this times sigma_max count as zero."""
    return EPS * max(shape)


def singular_values(A) -> np.ndarray:
    """All min(N, K) singular values in descending order."""
    return np.linalg.svd(_as_matrix(A), compute_uv=False)


def _kappa_from_sigma(s: np.ndarray, shape: tuple[int, int]) -> float:
    smax, smin = s[0], s[-1]
    if smin < default_rank_tolerance(shape) * smax:
        return float("inf")
    return float(smax / smin)


def condition_number(A) -> float:
    """2-norm condition number sigma_max / sigma_min.

    Returns ``inf`` once sigma_min falls below the default rank tolerance, so
    an infinite kappa coincides with an effective rank below K.
    """
    A = _as_matrix(A)
    s = singular_values(A)
    if s[0] == 0.0:
        raise InvalidArgumentError("condition number of the zero matrix is undefined")
    return _kappa_from_sigma(s, A.shape)


def _kappa_or_inf(A: np.ndarray) -> float:
    s = singular_values(A)
    return float("inf") if s[0] == 0.0 else _kappa_from_sigma(s, A.shape)


def gram_at_zero(basis: BasisSet, x0: float) -> np.ndarray:
    """(A^T A)(0) / N in closed form: the outer product f(x0) f(x0)^T."""
    f = basis_values(basis, float(x0))
    if not np.all(np.isfinite(f)) or float(f @ f) <= 0.0:
        raise InvalidArgumentError(f"sum of squared basis values at x0={x0} must be positive")
    return np.outer(f, f)


def _residual(A, x, b) -> float:
    return float(np.linalg.norm(A @ x - b))


def solve_normal_equations(A, b) -> LsSolution:
    """Solve (A^T A) x = A^T b with a Cholesky factorization."""
    A = _as_matrix(A)
    b = _as_rhs(A, b)
    N, K = A.shape
    if N < K:
        raise SingularSystemError(f"normal equations need N >= K, got N={N}, K={K}", kappa=float("inf"))
    gram = A.T @ A
    try:
        L = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError:
        raise SingularSystemError("Gram matrix A^T A is numerically singular", kappa=_kappa_or_inf(A)) from None
    # rounding can leave a tiny positive pivot on an exactly singular Gram matrix
    pivots = np.diag(L) ** 2
    if np.any(pivots <= EPS * K * np.diag(gram)):
        raise SingularSystemError("Gram matrix A^T A is numerically singular", kappa=_kappa_or_inf(A))
    y = solve_triangular(L, A.T @ b, lower=True)
    x = solve_triangular(L.T, y, lower=False)
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("Cholesky solve produced non-finite coefficients", kappa=_kappa_or_inf(A))
    return LsSolution(x, Solver.NORMAL, K, _kappa_or_inf(A), _residual(A, x, b))


def householder_qr(A) -> tuple[np.ndarray, np.ndarray]:
    """Householder triangularization of a tall matrix.

    Returns the K reflector vectors (stacked as columns of an N x K array,
    each unit-norm and zero above its pivot row) and the K x K upper
    triangular factor R.
    """
    R = _as_matrix(A).copy()
    N, K = R.shape
    V = np.zeros((N, K))
    for k in range(min(N, K)):
        x = R[k:, k]
        norm_x = np.linalg.norm(x)
        if norm_x == 0.0:
            continue
        v = x.copy()
        v[0] += np.copysign(norm_x, x[0])
        v /= np.linalg.norm(v)
        R[k:, k:] -= 2.0 * np.outer(v, v @ R[k:, k:])
        V[k:, k] = v
    return V, np.triu(R[:K, :])


def apply_qt(V: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Compute Q^T b from the reflectors returned by :func:`householder_qr`."""
    b = b.copy()
    for k in range(V.shape[1]):
        v = V[k:, k]
        b[k:] -= 2.0 * v * (v @ b[k:])
    return b


def solve_qr(A, b) -> LsSolution:
    """Least squares by Householder QR and back substitution on R."""
    A = _as_matrix(A)
    b = _as_rhs(A, b)
    N, K = A.shape
    if N < K:
        raise RankDeficientError(f"QR needs N >= K, got N={N}, K={K}", kappa=float("inf"))
    V, R = householder_qr(A)
    diag = np.abs(np.diag(R))
    if diag.max() == 0.0 or diag.min() <= default_rank_tolerance(A.shape) * diag.max():
        raise RankDeficientError("R has a zero or sub-tolerance diagonal entry", kappa=_kappa_or_inf(A))
    qtb = apply_qt(V, b)
    x = solve_triangular(R, qtb[:K], lower=False)
    return LsSolution(x, Solver.QR, K, _kappa_or_inf(A), _residual(A, x, b))


def solve_svd(A, b, rank_tolerance: float | None = None) -> LsSolution:
    """Minimum-norm least squares, truncating singular values below ``rank_tolerance * sigma_max``."""
    A = _as_matrix(A)
    b = _as_rhs(A, b)
    if rank_tolerance is None:
        rank_tolerance = default_rank_tolerance(A.shape)
    if not (np.isfinite(rank_tolerance) and rank_tolerance >= 0):
        raise InvalidArgumentError(f"rank_tolerance must be >= 0, got {rank_tolerance}")
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    keep = (s >= rank_tolerance * s[0]) & (s > 0.0)
    r = int(keep.sum())
    x = Vt[:r].T @ ((U[:, :r].T @ b) / s[:r])
    return LsSolution(x, Solver.SVD, r, _kappa_or_inf(A), _residual(A, x, b))


def solve(A, b, solver: Solver | str = Solver.SVD, rank_tolerance: float | None = None) -> LsSolution:
    solver = Solver(solver)
    if solver is Solver.NORMAL:
        return solve_normal_equations(A, b)
    if solver is Solver.QR:
        return solve_qr(A, b)
    return solve_svd(A, b, rank_tolerance)
