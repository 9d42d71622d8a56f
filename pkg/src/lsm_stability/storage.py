"""Reading and writing path sets.

CSV layout: header ``path_index,t_0,...,t_M`` then one row per path. Numbers
use Python's shortest round-trip ``repr`` so the text is reproducible
byte-for-byte and parses back to the identical floats.

NPZ layout: arrays ``values`` (N x (M+1)), ``T`` (scalar), ``seed`` (scalar,
-1 when unknown).
"""

from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from .errors import InvalidArgumentError
from .paths import PathSet, TimeGrid


def pathset_to_csv(pathset: PathSet) -> str:
    M = pathset.grid.M
    buf = io.StringIO()
    buf.write(",".join(["path_index"] + [f"t_{m}" for m in range(M + 1)]) + "\n")
    for n, row in enumerate(pathset.values.tolist()):
        buf.write(str(n) + "," + ",".join(map(repr, row)) + "\n")
    return buf.getvalue()


def write_pathset(pathset: PathSet, path, fmt: str = "csv") -> None:
    path = Path(path)
    if fmt == "npz":
        seed = -1 if pathset.seed is None else pathset.seed
        with open(path, "wb") as fh:
            np.savez(fh, values=pathset.values, T=pathset.grid.T, seed=seed)
    else:
        path.write_text(pathset_to_csv(pathset))


def read_pathset(path, T: float = 1.0) -> PathSet:
    """Load a path set written by :func:`write_pathset`.

    CSV files carry no time values, so the horizon ``T`` is supplied by the
    caller and M is inferred from the column count.
    """
    path = Path(path)
    if path.suffix == ".npz":
        with np.load(path) as data:
            values = data["values"]
            seed = int(data["seed"])
            T = float(data["T"])
        return PathSet(TimeGrid(T, values.shape[1] - 1), values, None if seed < 0 else seed)

    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InvalidArgumentError(f"{path}: empty path file")
    header = rows[0]
    n_dates = len(header) - 1
    expected = ["path_index"] + [f"t_{m}" for m in range(n_dates)]
    if header != expected:
        raise InvalidArgumentError(f"{path}: header must be path_index,t_0..t_M")
    if len(rows) < 2:
        raise InvalidArgumentError(f"{path}: no paths")
    try:
        values = np.array([[float(v) for v in row[1:]] for row in rows[1:]])
    except ValueError as exc:
        raise InvalidArgumentError(f"{path}: {exc}") from None
    if values.ndim != 2 or values.shape[1] != n_dates or not np.all(np.isfinite(values)):
        raise InvalidArgumentError(f"{path}: ragged or non-finite rows")
    return PathSet(TimeGrid(T, n_dates - 1), values)
