"""Exception types raised across the package."""

from __future__ import annotations


class LsmError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(LsmError, ValueError):
    pass


class SolverError(LsmError):
    """A least-squares solve failed; carries the condition number of the design matrix.

    ``date_index`` is filled in by the pricer when the failure happens inside
    the backward induction.
    """

    def __init__(self, message: str, kappa: float, date_index: int | None = None):
        super().__init__(message)
        self.kappa = kappa
        self.date_index = date_index

    def __str__(self) -> str:
        msg = super().__str__()
        where = f" at date index {self.date_index}" if self.date_index is not None else ""
        return f"{msg}{where} (kappa={_fmt_kappa(self.kappa)})"


class SingularSystemError(SolverError):
    """The Gram matrix A^T A could not be factorized."""


class RankDeficientError(SolverError):
    """Householder QR found a (numerically) zero diagonal entry in R."""


class InsufficientDataError(LsmError):
    pass


def _fmt_kappa(kappa: float) -> str:
    return "inf" if kappa == float("inf") else f"{kappa:.6g}"
