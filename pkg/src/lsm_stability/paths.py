"""Monte Carlo paths of a scalar diffusion on a uniform time grid.

Gaussian increments come from per-path Philox substreams: path ``n`` owns the
counter block whose third word equals ``n``, so the increment for
``(path, step)`` is a fixed function of ``(seed, path, step)``. Paths can be
generated in any order or on any number of threads with identical output, and
growing ``N`` never changes the paths that already existed.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError


class ModelKind(str, enum.Enum):
    LOGNORMAL = "lognormal"
    ARITHMETIC = "arithmetic"


class Scheme(str, enum.Enum):
    EULER = "euler"
    MILSTEIN = "milstein"


@dataclass(frozen=True)
class SdeModel:
    """Constant-coefficient diffusion.

    ``LOGNORMAL``: dX = mu X dt + sigma X dW.
    ``ARITHMETIC``: dX = mu dt + sigma dW (no floor at zero).
    """

    kind: ModelKind = ModelKind.LOGNORMAL
    mu: float = 0.0
    sigma: float = 0.15
    x0: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind(self.kind))
        if not np.isfinite(self.mu):
            raise InvalidArgumentError(f"mu must be finite, got {self.mu}")
        if not (np.isfinite(self.sigma) and self.sigma >= 0):
            raise InvalidArgumentError(f"sigma must be >= 0, got {self.sigma}")
        if not (np.isfinite(self.x0) and self.x0 > 0):
            raise InvalidArgumentError(f"x0 must be > 0, got {self.x0}")


@dataclass(frozen=True)
class TimeGrid:
    T: float
    M: int

    def __post_init__(self):
        if isinstance(self.M, bool) or int(self.M) != self.M or self.M < 2:
            raise InvalidArgumentError(f"M must be an integer >= 2, got {self.M}")
        if not (np.isfinite(self.T) and self.T > 0):
            raise InvalidArgumentError(f"T must be > 0, got {self.T}")
        object.__setattr__(self, "M", int(self.M))

    @property
    def dt(self) -> float:
        return self.T / self.M

    @property
    def nodes(self) -> np.ndarray:
        # T*m/M per node rather than cumulative sums, so t_M == T exactly
        return np.array([self.T * m / self.M for m in range(self.M + 1)])

    def time(self, m: int) -> float:
        return self.T * m / self.M


@dataclass(frozen=True, eq=False)
class PathSet:
    """Simulated values, ``values[n, m]`` is X at node ``t_m`` on path ``n``."""

    grid: TimeGrid
    values: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[0] < 1:
            raise InvalidArgumentError("path values must be a non-empty 2-D array")
        if values.shape[1] != self.grid.M + 1:
            raise InvalidArgumentError(
                f"expected {self.grid.M + 1} columns for M={self.grid.M}, got {values.shape[1]}"
            )
        if not np.all(values[:, 0] == values[0, 0]):
            raise InvalidArgumentError("column 0 must hold the same initial value on every path")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n_paths(self) -> int:
        return self.values.shape[0]

    @property
    def x0(self) -> float:
        return float(self.values[0, 0])


def build_time_grid(T: float, M: int) -> TimeGrid:
    return TimeGrid(T=T, M=M)


def _philox_key(seed: int) -> np.ndarray:
    return np.random.SeedSequence(seed).generate_state(2, np.uint64)


def gaussian_increments(seed: int, path_indices, n_steps: int) -> np.ndarray:
    """Standard normal draws, one row per requested path index."""
    key = _philox_key(seed)
    out = np.empty((len(path_indices), n_steps))
    for row, n in enumerate(path_indices):
        bitgen = np.random.Philox(key=key, counter=[0, 0, int(n), 0])
        out[row] = np.random.Generator(bitgen).standard_normal(n_steps)
    return out


def _draw_all(seed: int, n_paths: int, n_steps: int, workers: int) -> np.ndarray:
    if workers <= 1 or n_paths < 2 * workers:
        return gaussian_increments(seed, range(n_paths), n_steps)
    bounds = np.linspace(0, n_paths, workers + 1).astype(int)
    chunks = [range(lo, hi) for lo, hi in zip(bounds[:-1], bounds[1:])]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda c: gaussian_increments(seed, c, n_steps), chunks))
    return np.vstack(parts)


def step(model: SdeModel, scheme: Scheme, x: np.ndarray, dt: float, dw: np.ndarray) -> np.ndarray:
    """Advance ``x`` by one time step given Brownian increments ``dw``."""
    mu, sigma = model.mu, model.sigma
    if model.kind is ModelKind.ARITHMETIC:
        # sigma does not depend on x, so the Milstein correction vanishes
        return x + mu * dt + sigma * dw
    growth = 1.0 + mu * dt + sigma * dw
    if Scheme(scheme) is Scheme.MILSTEIN:
        growth = growth + 0.5 * sigma * sigma * (dw * dw - dt)
    return x * growth


def simulate(
    model: SdeModel,
    grid: TimeGrid,
    N: int,
    scheme: Scheme | str = Scheme.EULER,
    seed: int = 0,
    workers: int | None = None,
) -> PathSet:
    """Simulate ``N`` paths of ``model`` on ``grid``.

    The result depends only on ``(model, grid, N, scheme, seed)``; ``workers``
    controls how many threads draw the Gaussian increments. ``None`` reads
    ``LSM_WORKERS`` from the environment and defaults to one thread.
    """
    if isinstance(N, bool) or int(N) != N or N < 1:
        raise InvalidArgumentError(f"N must be a positive integer, got {N}")
    scheme = Scheme(scheme)
    if workers is None:
        workers = int(os.environ.get("LSM_WORKERS", "1"))
    N = int(N)
    dt = grid.dt
    z = _draw_all(seed, N, grid.M, workers)
    dw = z * np.sqrt(dt)
    values = np.empty((N, grid.M + 1))
    values[:, 0] = model.x0
    for m in range(grid.M):
        values[:, m + 1] = step(model, scheme, values[:, m], dt, dw[:, m])
    return PathSet(grid=grid, values=values, seed=seed)
