"""Command-line entry point.

One subcommand per experiment; common flags override the config file.
Exit codes: 0 success, 2 configuration error, 3 budget rejection, 4 I/O
failure.
"""

from __future__ import annotations

import argparse
import sys

from . import __version__
from .backend import BACKEND
from .harness import (EXPERIMENTS, BudgetError, ConfigError, ExperimentConfig,
                      emit, load_config, run_experiment)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_IO = 4


def _int_list(text: str) -> list[int]:
    return [int(t) for t in text.replace(",", " ").split()]


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cylwalk",
        description="Random-walk experiments on the discrete cylinder "
                    f"(kernel backend: {BACKEND})")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="kind", required=True, metavar="experiment")
    for kind in EXPERIMENTS:
        sp = sub.add_parser(kind, help=f"run the {kind} experiment")
        sp.add_argument("--config", help="INI config file")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--replicas", type=int)
        sp.add_argument("--out-dir")
        sp.add_argument("--format", help="comma-separated: csv,json,svg")
        sp.add_argument("--cadence", type=int)
        sp.add_argument("--budget", type=int)
        sp.add_argument("-d", "--dim", type=int, help="torus dimension")
        sp.add_argument("--n-values", type=_int_list,
                        help="torus side lengths, comma separated")
        if kind in ("events", "excursions", "expbound"):
            sp.add_argument("--u", type=float)
            sp.add_argument("--u-grid", type=_float_list)
        if kind == "excursions":
            sp.add_argument("--gamma-grid", type=_float_list)
        if kind == "events":
            sp.add_argument("--k-factor", type=float)
            sp.add_argument("--plane-samples", type=int)
        if kind == "localtime":
            sp.add_argument("--ks", type=_int_list)
        if kind == "thresholds":
            sp.add_argument("--d-lo", type=int)
            sp.add_argument("--d-hi", type=int)
        if kind == "peierls":
            sp.add_argument("--n-max", type=int)
        if kind == "qtable":
            sp.add_argument("--nu-values", type=_int_list)
            sp.add_argument("--tol", type=float)
    return p


_PARAM_FLAGS = {
    "u": "u", "u_grid": "u_grid", "gamma_grid": "gamma_grid",
    "k_factor": "k_factor", "plane_samples": "plane_samples", "ks": "ks",
    "d_lo": "d_lo", "d_hi": "d_hi", "n_max": "n_max",
    "nu_values": "nu_values", "tol": "tol",
}


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    if args.config:
        cfg = load_config(args.config, kind=args.kind)
    else:
        cfg = ExperimentConfig(kind=args.kind)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.replicas is not None:
        cfg.replicas = args.replicas
    if args.out_dir is not None:
        cfg.out_dir = args.out_dir
    if args.format is not None:
        cfg.formats = [f.strip() for f in args.format.split(",") if f.strip()]
    if args.cadence is not None:
        cfg.cadence = args.cadence
    if args.budget is not None:
        cfg.budget = args.budget
    if args.dim is not None:
        cfg.d = args.dim
    if args.n_values is not None:
        cfg.n_values = args.n_values
    for flag, key in _PARAM_FLAGS.items():
        val = getattr(args, flag, None)
        if val is not None:
            cfg.params[key] = val
    # re-validate after overrides
    return ExperimentConfig(kind=cfg.kind, d=cfg.d, n_values=cfg.n_values,
                            replicas=cfg.replicas, seed=cfg.seed,
                            cadence=cfg.cadence, budget=cfg.budget,
                            out_dir=cfg.out_dir, formats=cfg.formats,
                            params=cfg.params)


def _svg_series(rec):
    if rec.experiment in ("disconnect", "scaling") and "per_N" in rec.summary:
        per = rec.summary["per_N"]
        ns = sorted(int(n) for n in per)
        meds = [per[str(n)].get("median") for n in ns]
        if all(m is not None for m in meds):
            return ("median disconnection time vs N", "N", "median T",
                    [("median T_N", ns, meds)])
    if rec.experiment == "events":
        us = rec.summary.get("u_grid", [])
        series = []
        for name in ("segments", "components", "giant"):
            probs = rec.summary.get(f"P_{name}", {})
            series.append((name, us, [probs.get(str(u)) for u in us]))
        return ("vacant-set event probabilities", "u", "probability", series)
    if rec.experiment == "excursions":
        gs = rec.summary.get("gamma_grid", [])
        pr = rec.summary.get("probability", {})
        return ("excursion budget event", "gamma", "probability",
                [("P[all levels slow]", gs, [pr.get(str(g)) for g in gs])])
    return None


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        rec = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BudgetError as exc:
        print(f"budget rejection: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    try:
        paths = emit(rec, cfg, svg_series=_svg_series(rec))
    except IOError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in paths:
        print(path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
