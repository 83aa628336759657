"""Sweeps, engine comparison, and machine-readable output.

A sweep is the Cartesian product of an active-BS intensity grid, a list of
(lambda_m, Q) deployment pairs, a varsigma grid, and a threshold grid; each
point produces one MetricRow with simulated and/or analytic values.  Rows
are computed in a deterministic order, and per-drop substreams depend only
on (seed, drop index), so worker count never changes the output bytes.
"""
from __future__ import annotations

import io
import json
import math
import time
from dataclasses import dataclass, field, asdict
from typing import Iterable, Optional

import numpy as np

from .analytic.coverage import CoverageEngine
from .analytic.efficiency import aee as aee_fn, ece as ece_fn
from .analytic.moments import mean_interference_power, mean_signal_power
from .analytic.rate import ase as ase_fn
from .config import (
    CoverageParams,
    ExperimentConfig,
    FadingSpec,
    PowerModel,
    QuadratureConfig,
    db_to_linear,
)
from .montecarlo import (
    estimate_ase,
    estimate_coverage,
    estimate_signal_stats,
    simulate_drops,
    simulate_moment_drops,
)

__all__ = ["SweepConfig", "MetricRow", "run_sweep", "compare_report", "preset", "PRESETS",
           "rows_to_csv", "rows_to_jsonl", "rows_from_csv"]

SCHEMA_VERSION = "risudn-metrics-v1"

COLUMNS = (
    "lambda_active", "lambda_m", "Q", "varsigma", "delta_db", "n_drops", "seed",
    "engine", "coverage_method", "geometry_mode",
    "sim_coverage", "sim_coverage_lo", "sim_coverage_hi",
    "sim_ase", "sim_ase_ci",
    "sim_signal_power", "sim_signal_power_ci",
    "sim_interference_power", "sim_interference_power_ci",
    "sim_i2_power", "sim_i2_power_ci",
    "ana_coverage", "ana_ase", "ana_aee", "ana_ece",
    "ana_signal_power", "ana_interference_power", "ana_i2_power",
    "wall_time_s", "error",
)


@dataclass
class MetricRow:
    lambda_active: float
    lambda_m: float
    Q: int
    varsigma: int
    delta_db: float
    n_drops: int
    seed: int
    engine: str
    coverage_method: str = "cf"
    geometry_mode: str = "exact"
    sim_coverage: Optional[float] = None
    sim_coverage_lo: Optional[float] = None
    sim_coverage_hi: Optional[float] = None
    sim_ase: Optional[float] = None
    sim_ase_ci: Optional[float] = None
    sim_signal_power: Optional[float] = None
    sim_signal_power_ci: Optional[float] = None
    sim_interference_power: Optional[float] = None
    sim_interference_power_ci: Optional[float] = None
    sim_i2_power: Optional[float] = None
    sim_i2_power_ci: Optional[float] = None
    ana_coverage: Optional[float] = None
    ana_ase: Optional[float] = None
    ana_aee: Optional[float] = None
    ana_ece: Optional[float] = None
    ana_signal_power: Optional[float] = None
    ana_interference_power: Optional[float] = None
    ana_i2_power: Optional[float] = None
    wall_time_s: float = 0.0
    error: str = ""

    def validate(self) -> None:
        for name in COLUMNS:
            v = getattr(self, name)
            if isinstance(v, float) and not math.isfinite(v):
                raise ValueError(f"non-finite value in column {name}")
        paired = (("sim_coverage", "sim_coverage_lo"), ("sim_ase", "sim_ase_ci"))
        for val, ci in paired:
            if (getattr(self, val) is None) != (getattr(self, ci) is None):
                raise ValueError(f"CI column {ci} must accompany {val}")


@dataclass(frozen=True)
class SweepConfig:
    lambda_active_grid: tuple[float, ...] = (0.01,)
    deployments: tuple[tuple[float, int], ...] = ((0.01, 10),)  # (lambda_m, Q)
    varsigma_grid: tuple[int, ...] = (1,)
    delta_db_grid: tuple[float, ...] = (0.0,)
    n_drops: int = 1000
    seed: int = 0
    engine: str = "both"           # sim | analytic | both
    fast: bool = False
    geometry_mode: str = "exact"
    coverage_method: str = "cf"
    guard_factor: float = 5.0
    power: PowerModel = field(default_factory=PowerModel)
    moment_drops: int = 0          # 0: skip simulated moments; else channel-averaged drops
    n_workers: int = 1

    def __post_init__(self):
        for grid in (self.lambda_active_grid, self.deployments, self.varsigma_grid, self.delta_db_grid):
            if len(grid) == 0:
                raise ValueError("every sweep grid must be non-empty")
        if self.n_drops < 1:
            raise ValueError("n_drops must be >= 1")


def _sim_point(cfg: ExperimentConfig, deltas_db: Iterable[float], moment_drops: int,
               n_workers: int) -> dict:
    """Simulate once per parameter point; all thresholds reuse the same drops."""
    acc = simulate_drops(cfg, n_workers=n_workers)
    out = {"per_delta": {}}
    for ddb in deltas_db:
        cov, lo, hi = estimate_coverage(cfg, db_to_linear(ddb), acc=acc)
        out["per_delta"][ddb] = (cov, lo, hi)
    a, aci = estimate_ase(cfg, acc=acc)
    out["ase"] = (a, aci)
    if moment_drops > 0:
        macc = simulate_moment_drops(
            ExperimentConfig(**{**cfg.to_dict(), "n_drops": moment_drops}), n_workers=n_workers
        )
        st = estimate_signal_stats(cfg, acc=macc)
    else:
        st = estimate_signal_stats(cfg, acc=acc)
    out["stats"] = st
    return out


def run_sweep(sweep: SweepConfig) -> list[MetricRow]:
    """One MetricRow per grid point; engine errors are recorded per row and
    the sweep continues (callers map any error rows to a nonzero exit)."""
    rows: list[MetricRow] = []
    quad = QuadratureConfig()
    for vs in sweep.varsigma_grid:
        for lam_m, q in sweep.deployments:
            fading = FadingSpec(varsigma=vs, alpha=4.0, Q=q)
            for lam_a in sweep.lambda_active_grid:
                t0 = time.time()
                cfg = ExperimentConfig(
                    lambda_active=lam_a, lambda_m=lam_m, fading=fading, power=sweep.power,
                    seed=sweep.seed, n_drops=sweep.n_drops, guard_factor=sweep.guard_factor,
                    fast=sweep.fast, geometry_mode=sweep.geometry_mode,
                    coverage_method=sweep.coverage_method,
                )
                sim = None
                err = ""
                if sweep.engine in ("sim", "both"):
                    try:
                        sim = _sim_point(cfg, sweep.delta_db_grid, sweep.moment_drops, sweep.n_workers)
                    except Exception as exc:  # record, keep sweeping
                        err = f"sim: {exc}"
                ana = None
                if sweep.engine in ("analytic", "both"):
                    try:
                        ana = _analytic_point(cfg, sweep.delta_db_grid, quad)
                    except Exception as exc:
                        err = (err + "; " if err else "") + f"analytic: {exc}"
                wall = time.time() - t0
                for ddb in sweep.delta_db_grid:
                    row = MetricRow(
                        lambda_active=lam_a, lambda_m=lam_m, Q=q, varsigma=vs,
                        delta_db=ddb, n_drops=sweep.n_drops, seed=sweep.seed,
                        engine=sweep.engine, coverage_method=sweep.coverage_method,
                        geometry_mode=sweep.geometry_mode,
                        wall_time_s=round(wall, 3), error=err,
                    )
                    if sim is not None:
                        cov, lo, hi = sim["per_delta"][ddb]
                        row.sim_coverage, row.sim_coverage_lo, row.sim_coverage_hi = cov, lo, hi
                        row.sim_ase, row.sim_ase_ci = sim["ase"]
                        st = sim["stats"]
                        row.sim_signal_power = st["signal_power"]
                        row.sim_signal_power_ci = st["signal_power_ci"]
                        row.sim_interference_power = st["interference_power"]
                        row.sim_interference_power_ci = st["interference_power_ci"]
                        row.sim_i2_power = st["i2_power"]
                        row.sim_i2_power_ci = st["i2_power_ci"]
                    if ana is not None:
                        row.ana_coverage = ana["coverage"][ddb]
                        row.ana_ase = ana["ase"]
                        row.ana_aee = ana["aee"]
                        row.ana_ece = ana["ece"][ddb]
                        row.ana_signal_power = ana["signal_power"]
                        row.ana_interference_power = ana["interference_power"]
                        row.ana_i2_power = ana["i2_power"]
                    row.validate()
                    rows.append(row)
    return rows


def _analytic_point(cfg: ExperimentConfig, deltas_db: Iterable[float],
                    quad: QuadratureConfig) -> dict:
    spec = cfg.fading
    sm = mean_signal_power(spec, cfg.lambda_active, cfg.lambda_m, cfg.power.P_tr,
                           mode=cfg.geometry_mode, quad=quad)
    im = mean_interference_power(spec, cfg.lambda_active, cfg.lambda_m, cfg.power.P_tr,
                                 mode=cfg.geometry_mode, quad=quad)
    base = CoverageParams(
        varsigma=spec.varsigma, alpha=spec.alpha, Q=spec.Q,
        lambda_active=cfg.lambda_active, lambda_m=cfg.lambda_m, delta=1.0,
    )
    engine = CoverageEngine(base, cfg.power, quad, cfg.geometry_mode)
    coverage = {}
    ece = {}
    for ddb in deltas_db:
        c = engine.coverage(db_to_linear(ddb), method=cfg.coverage_method)
        coverage[ddb] = c
        ece[ddb] = ece_fn(c, cfg.lambda_active, cfg.lambda_m, spec.Q, cfg.power)
    a = ase_fn(base, quad, cfg.power, mode=cfg.geometry_mode, engine=engine)
    return {
        "coverage": coverage,
        "ase": a,
        "aee": aee_fn(a, cfg.lambda_active, cfg.lambda_m, spec.Q, cfg.power),
        "ece": ece,
        "signal_power": sm.total,
        "interference_power": im["total"],
        "i2_power": im["i2"],
    }


# ------------------------------------------------------------------ output

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".10g")
    return str(v)


def rows_to_csv(rows: list[MetricRow]) -> str:
    buf = io.StringIO()
    buf.write("# schema=" + SCHEMA_VERSION + "\n")
    buf.write(",".join(COLUMNS) + "\n")
    for row in rows:
        buf.write(",".join(_fmt(getattr(row, c)) for c in COLUMNS) + "\n")
    return buf.getvalue()


def rows_to_jsonl(rows: list[MetricRow]) -> str:
    lines = [json.dumps({"schema": SCHEMA_VERSION})]
    for row in rows:
        lines.append(json.dumps(asdict(row)))
    return "\n".join(lines) + "\n"


def rows_from_csv(text: str) -> list[MetricRow]:
    lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    if tuple(header) != COLUMNS:
        raise ValueError("unexpected CSV columns (schema mismatch)")
    out = []
    for ln in lines[1:]:
        vals = ln.split(",")
        kw = {}
        for name, raw in zip(COLUMNS, vals):
            if raw == "":
                kw[name] = None
            elif name in ("Q", "varsigma", "n_drops", "seed"):
                kw[name] = int(raw)
            elif name in ("engine", "error", "coverage_method", "geometry_mode"):
                kw[name] = raw
            else:
                kw[name] = float(raw)
        kw["error"] = kw.get("error") or ""
        out.append(MetricRow(**kw))
    return out


# ----------------------------------------------------------------- report

def compare_report(rows: list[MetricRow], tolerances: Optional[dict] = None) -> dict:
    """Per-metric max/mean relative deviation between engines, plus trend checks.

    ``bound_direction_anomalies`` counts rows whose analytic coverage falls
    below the simulated lower confidence bound; that is only a defect when
    the bound-type coverage evaluation was used (it is an upper bound).
    """
    tolerances = tolerances or {}
    metrics = {
        "coverage": ("sim_coverage", "ana_coverage"),
        "ase": ("sim_ase", "ana_ase"),
        "signal_power": ("sim_signal_power", "ana_signal_power"),
        "interference_power": ("sim_interference_power", "ana_interference_power"),
    }
    report: dict = {"schema": SCHEMA_VERSION, "n_rows": len(rows), "metrics": {}}
    usable = False
    for name, (sim_col, ana_col) in metrics.items():
        devs = []
        for row in rows:
            s = getattr(row, sim_col)
            a = getattr(row, ana_col)
            if s is None or a is None or s == 0:
                continue
            devs.append(abs(a - s) / abs(s))
        if not devs:
            continue
        usable = True
        entry = {"max_rel_dev": max(devs), "mean_rel_dev": sum(devs) / len(devs), "n": len(devs)}
        if name in tolerances:
            entry["tolerance"] = tolerances[name]
            entry["pass"] = entry["max_rel_dev"] <= tolerances[name]
        report["metrics"][name] = entry
    if not usable:
        raise ValueError("rows contain no comparable simulated/analytic column pairs")
    anomalies = sum(
        1
        for row in rows
        if row.sim_coverage_lo is not None
        and row.ana_coverage is not None
        and row.coverage_method == "bound"
        and row.ana_coverage < row.sim_coverage_lo
    )
    report["bound_direction_anomalies"] = anomalies
    report["coverage_monotone_in_lambda"] = _monotone_check(rows)
    return report


def _monotone_check(rows: list[MetricRow]) -> Optional[bool]:
    """True if analytic coverage is non-increasing along the lambda grid
    within each (deployment, varsigma, delta) group with > 1 intensity."""
    groups: dict = {}
    for row in rows:
        if row.ana_coverage is None:
            continue
        key = (row.lambda_m, row.Q, row.varsigma, row.delta_db)
        groups.setdefault(key, []).append((row.lambda_active, row.ana_coverage))
    checked = False
    for vals in groups.values():
        if len(vals) < 2:
            continue
        vals.sort()
        checked = True
        cov = [c for _, c in vals]
        if any(c2 > c1 + 1e-9 for c1, c2 in zip(cov, cov[1:])):
            return False
    return True if checked else None


def report_to_text(report: dict) -> str:
    lines = [f"rows: {report['n_rows']}"]
    for name, entry in report["metrics"].items():
        line = f"{name}: max rel dev {entry['max_rel_dev']:.3%}, mean {entry['mean_rel_dev']:.3%} (n={entry['n']})"
        if "pass" in entry:
            line += f" -> {'PASS' if entry['pass'] else 'FAIL'} at {entry['tolerance']:.0%}"
        lines.append(line)
    lines.append(f"bound-direction anomalies: {report['bound_direction_anomalies']}")
    mono = report.get("coverage_monotone_in_lambda")
    if mono is not None:
        lines.append(f"analytic coverage monotone non-increasing in lambda_active: {mono}")
    return "\n".join(lines) + "\n"


# ----------------------------------------------------------------- presets

def preset(name: str, n_drops: Optional[int] = None, seed: int = 0,
           engine: str = "both", fast: bool = False) -> SweepConfig:
    """Desk-scale sweep presets named after the figures they reproduce.

    The equal-power deployment control pairs {(0.1, 10), (0.05, 563)} and
    {(0.01, 10), (0.005, 563)} are kept intact; intensity grids and drop
    counts are shrunk to desk scale.
    """
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; have {sorted(PRESETS)}")
    base = PRESETS[name]
    kw = dict(
        lambda_active_grid=base["lambda_active_grid"],
        deployments=base["deployments"],
        varsigma_grid=base.get("varsigma_grid", (1,)),
        delta_db_grid=base.get("delta_db_grid", (0.0,)),
        n_drops=n_drops if n_drops is not None else base.get("n_drops", 2000),
        seed=seed,
        engine=base.get("engine", engine),
        fast=fast or base.get("fast", False),
    )
    return SweepConfig(**kw)


_LGRID = (0.001, 0.00316, 0.01, 0.0316, 0.1, 0.316, 1.0, 3.16)

PRESETS = {
    # mean signal/interference power vs active intensity; unimodal E|D|^2
    "fig6": dict(lambda_active_grid=_LGRID, deployments=((0.005, 563), (0.01, 10)),
                 engine="analytic", delta_db_grid=(0.0,)),
    # outage vs threshold at lambda' = 0.01 (Matthew effect)
    "fig7": dict(lambda_active_grid=(0.01,),
                 deployments=((0.0, 10), (0.01, 10), (0.05, 563)),
                 delta_db_grid=tuple(range(-30, 51, 10)), n_drops=4000, fast=True),
    # coverage vs active intensity
    "fig8": dict(lambda_active_grid=_LGRID,
                 deployments=((0.0, 10), (0.01, 10), (0.005, 563)),
                 delta_db_grid=(0.0,), engine="analytic"),
    # ASE vs active intensity
    "fig9": dict(lambda_active_grid=_LGRID,
                 deployments=((0.0, 10), (0.1, 10), (0.05, 563)),
                 delta_db_grid=(0.0,), engine="analytic"),
    # AEE vs active intensity (interior extremum)
    "fig10": dict(lambda_active_grid=_LGRID,
                  deployments=((0.0, 10), (0.1, 10), (0.05, 563)),
                  delta_db_grid=(0.0,), engine="analytic"),
    # ECE vs active intensity
    "fig11": dict(lambda_active_grid=_LGRID,
                  deployments=((0.0, 10), (0.1, 10), (0.05, 563)),
                  delta_db_grid=(0.0,), engine="analytic"),
}
