"""Command-line driver: ``lsm-stability simulate|price|scan``.

Configuration is layered: built-in defaults, then a ``--figure`` preset,
then a JSON ``--config`` file, then individual flags. The seed falls back to
the ``LSM_SEED`` environment variable and finally to 0.

Exit codes:
    0  success
    2  invalid configuration or arguments
    3  least-squares solver failure
    4  not enough finite condition numbers for the slope fit
    5  input/output error
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys

import numpy as np

from . import storage
from .config import ConfigError, RunConfig, defaults, figure_preset, load_file, merge
from .errors import InsufficientDataError, InvalidArgumentError, SolverError
from .lsm import lsm_price
from .paths import simulate
from .stability import describe, fit_loglog_slope, scan_condition_numbers, spearman_trend

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_INSUFFICIENT = 4
EXIT_IO = 5

DEFAULT_WINDOW = (0.009, 0.2)

log = logging.getLogger("lsm_stability")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lsm-stability", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--figure", help="preset: fig1 (lognormal, Milstein) or fig2 (normal, Euler)")
    common.add_argument("--seed", type=int)
    common.add_argument("--paths", type=int, help="number of Monte Carlo paths N")
    common.add_argument("--steps", type=int, help="number of time steps M")
    common.add_argument("--solver", help="normal, qr or svd")
    common.add_argument("--basis", help="monomial, laguerre, legendre, chebyshev or hermite")
    common.add_argument("--K", type=int, help="number of basis functions")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--window", help="slope-fit window t_lo:t_hi (default 0.009:0.2)")
    common.add_argument("--paths-file", help="read paths from a CSV/NPZ file instead of simulating")
    common.add_argument("--itm-only", action="store_true", default=None, help="regress on in-the-money paths only")
    common.add_argument("--kappa-out", help="price: also write per-date condition numbers as CSV")
    common.add_argument("--workers", type=int, help="threads used to draw random increments")
    common.add_argument("-v", "--verbose", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("simulate", parents=[common], help="simulate paths and write them out")
    sub.add_parser("price", parents=[common], help="price with least-squares Monte Carlo")
    sub.add_parser("scan", parents=[common], help="condition number of the regression at every date")
    return parser


def resolve_config(args) -> RunConfig:
    data = defaults()
    if args.figure:
        data = merge(data, figure_preset(args.figure))
    if args.config:
        data = merge(data, load_file(args.config))
    flags = {
        ("simulation", "seed"): args.seed,
        ("simulation", "N"): args.paths,
        ("grid", "M"): args.steps,
        ("solver", "name"): args.solver,
        ("solver", "itm_only"): args.itm_only,
        ("basis", "family"): args.basis,
        ("basis", "K"): args.K,
        ("output", "path"): args.out,
    }
    for (section, name), value in flags.items():
        if value is not None:
            data[section][name] = value
    if data["simulation"]["seed"] is None:
        env = os.environ.get("LSM_SEED")
        if env is not None:
            try:
                data["simulation"]["seed"] = int(env)
            except ValueError:
                raise ConfigError(f"LSM_SEED: expected an integer, got {env!r}") from None
        else:
            data["simulation"]["seed"] = 0
    return RunConfig.from_dict(data)


def parse_window(text: str | None) -> tuple[float, float]:
    if text is None:
        return DEFAULT_WINDOW
    try:
        lo, hi = (float(part) for part in text.split(":"))
    except ValueError:
        raise ConfigError(f"--window: expected t_lo:t_hi, got {text!r}") from None
    if not lo < hi:
        raise ConfigError(f"--window: need t_lo < t_hi, got {text!r}")
    return lo, hi


def obtain_paths(cfg: RunConfig, args):
    if args.paths_file:
        return storage.read_pathset(args.paths_file, T=cfg.grid.T)
    log.info("simulating N=%d M=%d scheme=%s seed=%d", cfg.N, cfg.grid.M, cfg.scheme.value, cfg.seed)
    return simulate(cfg.model, cfg.grid, cfg.N, cfg.scheme, cfg.seed, workers=args.workers)


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def _fmt(x: float) -> str:
    if math.isnan(x):
        return "nan"
    return "inf" if math.isinf(x) else repr(float(x))


def cmd_simulate(cfg: RunConfig, args) -> int:
    pathset = obtain_paths(cfg, args)
    if cfg.output_format == "npz":
        if cfg.output_path is None:
            raise ConfigError("output.path: npz output needs a file")
        storage.write_pathset(pathset, cfg.output_path, "npz")
    else:
        _emit(storage.pathset_to_csv(pathset), cfg.output_path)
    report = sys.stderr if cfg.output_path is None else sys.stdout
    print(f"N={pathset.n_paths} M={pathset.grid.M} seed={pathset.seed}", file=report)
    return EXIT_OK


def cmd_price(cfg: RunConfig, args) -> int:
    pathset = obtain_paths(cfg, args)
    est = lsm_price(pathset, cfg.payoff, cfg.basis, cfg.rate, cfg.solver, cfg.itm_only, cfg.rank_tolerance)
    kappas = est.per_date_kappa
    print(f"value: {_fmt(est.value)}")
    print(f"standard_error: {_fmt(est.standard_error)}")
    print(f"exercised_at_zero: {str(est.exercised_at_zero).lower()}")
    if np.any(~np.isnan(kappas)):
        m_min = int(np.nanargmin(kappas)) + 1
        print(f"kappa_min: {_fmt(float(np.nanmin(kappas)))}")
        print(f"kappa_max: {_fmt(float(np.nanmax(kappas)))}")
        print(f"kappa_argmin: date {m_min} (t={_fmt(pathset.grid.time(m_min))})")
    if args.kappa_out:
        lines = ["date_index,t,kappa"]
        lines += [f"{m},{_fmt(pathset.grid.time(m))},{_fmt(k)}" for m, k in enumerate(kappas.tolist(), start=1)]
        _emit("\n".join(lines) + "\n", args.kappa_out)
    return EXIT_OK


def cmd_scan(cfg: RunConfig, args) -> int:
    window = parse_window(args.window)
    pathset = obtain_paths(cfg, args)
    digest = {} if args.paths_file else describe(
        dict(model=cfg.model, grid=cfg.grid, N=cfg.N, scheme=cfg.scheme, basis=cfg.basis, seed=cfg.seed)
    )
    scan = scan_condition_numbers(pathset, cfg.basis, digest)
    _emit(scan.to_csv(), cfg.output_path)
    report = sys.stderr if cfg.output_path is None else sys.stdout
    fit = fit_loglog_slope(scan, window)
    rho = spearman_trend(scan, window)
    print(
        f"window: ({window[0]}, {window[1]}]  points: {fit.points_used}  "
        f"slope: {fit.slope:.6g}  intercept: {fit.intercept:.6g}  spearman: {rho:.6g}",
        file=report,
    )
    return EXIT_OK


COMMANDS = {"simulate": cmd_simulate, "price": cmd_price, "scan": cmd_scan}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
        return COMMANDS[args.command](cfg, args)
    except (ConfigError, InvalidArgumentError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except InsufficientDataError as exc:
        print(f"insufficient data: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
