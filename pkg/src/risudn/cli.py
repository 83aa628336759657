"""Command-line interface.

Subcommands: simulate, analyze, sweep, compare, preset.  Exit codes:
0 success, 1 one or more rows failed, 2 configuration error.
"""
from __future__ import annotations

import argparse
import json
import sys

from .config import ExperimentConfig, load_experiment_config
from .harness import (
    MetricRow,
    SweepConfig,
    compare_report,
    preset,
    report_to_text,
    rows_from_csv,
    rows_to_csv,
    rows_to_jsonl,
    run_sweep,
)

EXIT_OK = 0
EXIT_ROW_FAILURES = 1
EXIT_CONFIG = 2


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="TOML experiment config")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--drops", type=int, default=None)
    p.add_argument("--out", default=None, help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--engine", choices=("sim", "analytic", "both"), default=None)
    p.add_argument("--fast", action="store_true", help="approximation fast paths")


def _resolve_experiment(args) -> ExperimentConfig:
    overrides = {}
    if args.seed is not None:
        overrides["run.seed"] = args.seed
    if args.drops is not None:
        overrides["run.n_drops"] = args.drops
    if args.fast:
        overrides["run.fast"] = True
    if args.config:
        return load_experiment_config(args.config, overrides)
    kw = {}
    if args.seed is not None:
        kw["seed"] = args.seed
    if args.drops is not None:
        kw["n_drops"] = args.drops
    if args.fast:
        kw["fast"] = True
    return ExperimentConfig(**kw)


def _sweep_from_experiment(cfg: ExperimentConfig, engine: str, deltas=(0.0,)) -> SweepConfig:
    return SweepConfig(
        lambda_active_grid=(cfg.lambda_active,),
        deployments=((cfg.lambda_m, cfg.fading.Q),),
        varsigma_grid=(cfg.fading.varsigma,),
        delta_db_grid=tuple(deltas),
        n_drops=cfg.n_drops,
        seed=cfg.seed,
        engine=engine,
        fast=cfg.fast,
        geometry_mode=cfg.geometry_mode,
        coverage_method=cfg.coverage_method,
        power=cfg.power,
    )


def _emit(rows: list[MetricRow], args) -> int:
    text = rows_to_csv(rows) if args.format == "csv" else rows_to_jsonl(rows)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_ROW_FAILURES if any(r.error for r in rows) else EXIT_OK


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="risudn")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("simulate", "analyze"):
        p = sub.add_parser(name, help=f"{name} a single experiment point")
        _add_common(p)
        p.add_argument("--delta-db", type=float, nargs="*", default=[0.0])

    p = sub.add_parser("sweep", help="run a sweep from the [sweep] config table")
    _add_common(p)

    p = sub.add_parser("compare", help="engine-comparison report for a metrics file")
    p.add_argument("metrics", help="CSV produced by sweep/simulate")
    p.add_argument("--out", default=None)
    p.add_argument("--tolerance", type=float, default=None,
                   help="uniform relative tolerance applied to every metric")

    p = sub.add_parser("preset", help="run a figure preset (fig6..fig11)")
    p.add_argument("name")
    _add_common(p)

    args = parser.parse_args(argv)
    try:
        if args.command in ("simulate", "analyze"):
            cfg = _resolve_experiment(args)
            engine = args.engine or ("sim" if args.command == "simulate" else "analytic")
            rows = run_sweep(_sweep_from_experiment(cfg, engine, args.delta_db))
            return _emit(rows, args)
        if args.command == "sweep":
            if not args.config:
                raise ValueError("sweep requires --config with a [sweep] table")
            sweep = _load_sweep(args)
            rows = run_sweep(sweep)
            return _emit(rows, args)
        if args.command == "compare":
            with open(args.metrics) as fh:
                rows = rows_from_csv(fh.read())
            tol = None
            if args.tolerance is not None:
                tol = {k: args.tolerance for k in ("coverage", "ase", "signal_power", "interference_power")}
            report = compare_report(rows, tol)
            text = json.dumps(report, indent=2) + "\n" + report_to_text(report)
            if args.out:
                with open(args.out, "w") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
            failed = any(
                isinstance(m, dict) and m.get("pass") is False for m in report["metrics"].values()
            )
            return EXIT_ROW_FAILURES if failed else EXIT_OK
        if args.command == "preset":
            sweep = preset(args.name, n_drops=args.drops, seed=args.seed or 0,
                           engine=args.engine or "both", fast=args.fast)
            rows = run_sweep(sweep)
            return _emit(rows, args)
        raise ValueError(f"unknown command {args.command!r}")
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def _load_sweep(args) -> SweepConfig:
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib
    with open(args.config, "rb") as fh:
        raw = tomllib.load(fh)
    body = raw.get("sweep", {})
    kw = dict(
        lambda_active_grid=tuple(body.get("lambda_active", [0.01])),
        deployments=tuple((float(lm), int(q)) for lm, q in body.get("deployments", [[0.01, 10]])),
        varsigma_grid=tuple(int(v) for v in body.get("varsigma", [1])),
        delta_db_grid=tuple(float(d) for d in body.get("delta_db", [0.0])),
        n_drops=int(body.get("n_drops", 1000)),
        seed=int(body.get("seed", 0)),
        engine=str(body.get("engine", "both")),
        fast=bool(body.get("fast", False)),
        geometry_mode=str(body.get("geometry_mode", "exact")),
        coverage_method=str(body.get("coverage_method", "cf")),
        moment_drops=int(body.get("moment_drops", 0)),
        n_workers=int(body.get("n_workers", 1)),
    )
    if args.seed is not None:
        kw["seed"] = args.seed
    if args.drops is not None:
        kw["n_drops"] = args.drops
    if args.engine is not None:
        kw["engine"] = args.engine
    if args.fast:
        kw["fast"] = True
    return SweepConfig(**kw)


if __name__ == "__main__":
    raise SystemExit(main())
