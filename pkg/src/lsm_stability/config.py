"""Run configuration: JSON file + presets + command-line overrides.

Every field is validated before anything runs; the first violation raises
:class:`ConfigError` naming the offending field as ``section.field``.
"""

from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from pathlib import Path

from .basis import BasisSet, Family
from .lsm import Payoff, PayoffKind, RatePlan
from .paths import ModelKind, Scheme, SdeModel, TimeGrid
from .regress import Solver
from .stability import FIGURES, describe


class ConfigError(ValueError):
    pass


def _real(lo=None, strict=False, optional=False):
    def check(path, value):
        if value is None and optional:
            return None
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigError(f"{path}: expected a finite number, got {value!r}")
        if lo is not None and (value <= lo if strict else value < lo):
            raise ConfigError(f"{path}: must be {'>' if strict else '>='} {lo}, got {value!r}")
        return float(value)

    return check


def _int(lo=None):
    def check(path, value):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        if lo is not None and value < lo:
            raise ConfigError(f"{path}: must be >= {lo}, got {value!r}")
        return value

    return check


def _choice(*options):
    def check(path, value):
        if not isinstance(value, str) or value.lower() not in options:
            raise ConfigError(f"{path}: expected one of {', '.join(options)}, got {value!r}")
        return value.lower()

    return check


def _flag(path, value):
    if not isinstance(value, bool):
        raise ConfigError(f"{path}: expected true or false, got {value!r}")
    return value


def _rescale(path, value):
    if value is None:
        return None
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"{path}: expected [scale, shift] or null, got {value!r}")
    scale = _real()(f"{path}[0]", value[0])
    shift = _real()(f"{path}[1]", value[1])
    if scale == 0:
        raise ConfigError(f"{path}[0]: scale must be nonzero")
    return (scale, shift)


def _text(path, value):
    if value is not None and not isinstance(value, str):
        raise ConfigError(f"{path}: expected a string, got {value!r}")
    return value


# section -> field -> (validator, default)
SCHEMA = {
    "model": {
        "kind": (_choice(*(k.value for k in ModelKind)), "lognormal"),
        "mu": (_real(), 0.0),
        "sigma": (_real(0.0), 0.15),
        "x0": (_real(0.0, strict=True), 1.0),
    },
    "grid": {"T": (_real(0.0, strict=True), 1.0), "M": (_int(2), 100)},
    "simulation": {
        "N": (_int(1), 30000),
        "scheme": (_choice(*(s.value for s in Scheme)), "milstein"),
        "seed": (_int(0), None),
    },
    "basis": {
        "family": (_choice(*(f.value for f in Family)), "monomial"),
        "K": (_int(1), 3),
        "rescale": (_rescale, None),
    },
    "payoff": {"kind": (_choice(*(k.value for k in PayoffKind)), "put"), "strike": (_real(0.0, strict=True), 1.0)},
    "rate": {"r": (_real(0.0), 0.0)},
    "solver": {
        "name": (_choice(*(s.value for s in Solver)), "svd"),
        "rank_tolerance": (_real(0.0, optional=True), None),
        "itm_only": (_flag, False),
    },
    "output": {"path": (_text, None), "format": (_choice("csv", "npz"), "csv")},
}


def defaults() -> dict:
    return {section: {name: default for name, (_, default) in fields.items()} for section, fields in SCHEMA.items()}


def figure_preset(figure_id: str) -> dict:
    key = str(figure_id).lower()
    if key not in FIGURES:
        raise ConfigError(f"--figure: expected one of {', '.join(sorted(FIGURES))}, got {figure_id!r}")
    d = describe(FIGURES[key])
    return {
        "model": {"kind": d["kind"], "mu": d["mu"], "sigma": d["sigma"], "x0": d["x0"]},
        "grid": {"T": d["T"], "M": d["M"]},
        "simulation": {"N": d["N"], "scheme": d["scheme"]},
        "basis": {"family": d["basis"], "K": d["K"]},
    }


def merge(base: dict, override: dict, prefix: str = "") -> dict:
    """Overlay ``override`` onto ``base`` section by section, rejecting unknown keys."""
    out = copy.deepcopy(base)
    if not isinstance(override, dict):
        raise ConfigError(f"{prefix or 'config'}: expected an object")
    for section, fields in override.items():
        if section not in SCHEMA:
            raise ConfigError(f"{section}: unknown section")
        if not isinstance(fields, dict):
            raise ConfigError(f"{section}: expected an object, got {fields!r}")
        for name, value in fields.items():
            if name not in SCHEMA[section]:
                raise ConfigError(f"{section}.{name}: unknown field")
            out[section][name] = value
    return out


def load_file(path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"--config: cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"--config: {path} is not valid JSON ({exc.msg} at line {exc.lineno})") from None


@dataclass(frozen=True)
class RunConfig:
    model: SdeModel
    grid: TimeGrid
    N: int
    scheme: Scheme
    seed: int
    basis: BasisSet
    payoff: Payoff
    rate: RatePlan
    solver: Solver
    rank_tolerance: float | None
    itm_only: bool
    output_path: str | None
    output_format: str

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        data = merge(defaults(), raw)
        v = {}
        for section, fields in SCHEMA.items():
            for name, (check, _) in fields.items():
                v[section, name] = check(f"{section}.{name}", data[section][name])
        if v["simulation", "seed"] is None:
            raise ConfigError("simulation.seed: no seed given (flag, config file or LSM_SEED)")
        return cls(
            model=SdeModel(ModelKind(v["model", "kind"]), v["model", "mu"], v["model", "sigma"], v["model", "x0"]),
            grid=TimeGrid(v["grid", "T"], v["grid", "M"]),
            N=v["simulation", "N"],
            scheme=Scheme(v["simulation", "scheme"]),
            seed=v["simulation", "seed"],
            basis=BasisSet(Family(v["basis", "family"]), v["basis", "K"], v["basis", "rescale"]),
            payoff=Payoff(PayoffKind(v["payoff", "kind"]), v["payoff", "strike"]),
            rate=RatePlan(v["rate", "r"]),
            solver=Solver(v["solver", "name"]),
            rank_tolerance=v["solver", "rank_tolerance"],
            itm_only=v["solver", "itm_only"],
            output_path=v["output", "path"],
            output_format=v["output", "format"],
        )
