"""Regression basis functions and the per-date design matrix."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .paths import PathSet


class Family(str, enum.Enum):
    MONOMIAL = "monomial"
    LAGUERRE = "laguerre"
    LEGENDRE = "legendre"
    CHEBYSHEV = "chebyshev"
    HERMITE = "hermite"


@dataclass(frozen=True)
class BasisSet:
    """The first ``K`` members (degrees 0..K-1) of a polynomial family.

    ``rescale`` is an optional ``(scale, shift)`` pair; inputs are mapped to
    ``scale * x + shift`` before evaluation. Hermite uses the probabilists'
    convention He_n, Chebyshev is of the first kind.
    """

    family: Family = Family.MONOMIAL
    K: int = 3
    rescale: tuple[float, float] | None = None

    def __post_init__(self):
        try:
            object.__setattr__(self, "family", Family(self.family))
        except ValueError:
            names = ", ".join(f.value for f in Family)
            raise InvalidArgumentError(f"unknown basis family {self.family!r} (expected one of {names})")
        if isinstance(self.K, bool) or int(self.K) != self.K or self.K < 1:
            raise InvalidArgumentError(f"K must be an integer >= 1, got {self.K}")
        object.__setattr__(self, "K", int(self.K))
        if self.rescale is not None:
            scale, shift = (float(v) for v in self.rescale)
            if not (np.isfinite(scale) and np.isfinite(shift)) or scale == 0:
                raise InvalidArgumentError(f"rescale must be a finite (scale != 0, shift) pair, got {self.rescale}")
            object.__setattr__(self, "rescale", (scale, shift))

    def __call__(self, x) -> np.ndarray:
        """Evaluate all K functions at each entry of ``x``; shape ``x.shape + (K,)``."""
        return basis_values(self, x)


def basis_values(basis: BasisSet, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if basis.rescale is not None:
        scale, shift = basis.rescale
        x = scale * x + shift
    K = basis.K
    out = np.empty(x.shape + (K,))
    out[..., 0] = 1.0
    if K == 1:
        return out
    fam = basis.family
    out[..., 1] = 1.0 - x if fam is Family.LAGUERRE else x
    for n in range(1, K - 1):
        p, q = out[..., n], out[..., n - 1]
        if fam is Family.MONOMIAL:
            nxt = x * p
        elif fam is Family.CHEBYSHEV:
            nxt = 2.0 * x * p - q
        elif fam is Family.LEGENDRE:
            nxt = ((2 * n + 1) * x * p - n * q) / (n + 1)
        elif fam is Family.LAGUERRE:
            nxt = ((2 * n + 1 - x) * p - n * q) / (n + 1)
        else:
            nxt = x * p - n * q
        out[..., n + 1] = nxt
    return out


def evaluate_basis(basis: BasisSet, x: float) -> np.ndarray:
    """Return ``(f_1(x), ..., f_K(x))`` for a single finite ``x``."""
    x = float(x)
    if not np.isfinite(x):
        raise InvalidArgumentError(f"basis argument must be finite, got {x}")
    return basis_values(basis, x)


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """``entries[n, k] = f_k(X^n_t)`` for the date ``t``."""

    entries: np.ndarray
    t: float | None = None
    date_index: int | None = None

    def __post_init__(self):
        entries = np.array(self.entries, dtype=float)
        if entries.ndim != 2:
            raise InvalidArgumentError("design matrix must be 2-D")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def design_matrix(basis: BasisSet, pathset: PathSet, date_index: int, rows=None) -> DesignMatrix:
    """Assemble A(t_m); ``rows`` optionally restricts to a subset of paths."""
    M = pathset.grid.M
    if isinstance(date_index, bool) or int(date_index) != date_index or not 0 <= date_index <= M:
        raise InvalidArgumentError(f"date index must lie in [0, {M}], got {date_index}")
    x = pathset.values[:, int(date_index)]
    if rows is not None:
        x = x[rows]
    return DesignMatrix(basis_values(basis, x), t=pathset.grid.time(date_index), date_index=int(date_index))
