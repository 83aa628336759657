"""End-to-end Monte Carlo engine: drops, SINR per the received-signal model,
and empirical coverage / moment / spectral-efficiency estimators.

One drop: a typical UE sits at the origin of a disk window; the active-BS
process is sampled at intensity ``lambda_active`` (independent thinning of a
PPP is a PPP, so activity is folded into the intensity; the exact
association-based activity rule is exercised separately by
``activity_fraction_empirical``).  The nearest BS serves the UE.  RISs
associate to their nearest active BS; a RIS whose nearest BS is the serving
BS *and* whose panel admits both rays reflects coherently (phases matched to
the direct channel), every other reflecting RIS contributes a random-phase
cascade.  Interference sums the direct and reflected power of all other BSs.

Determinism: drop ``i`` depends only on ``(seed, i)``; chunked reductions
run in fixed chunk order, so worker count never changes results.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import cascade_distribution
from .config import ExperimentConfig
from .geometry import associate_nearest, reflection_state_rays, vertex_angle
from .ppp import make_drop_rng

__all__ = [
    "DropResult",
    "DropAccumulator",
    "run_drop",
    "simulate_drops",
    "simulate_moment_drops",
    "estimate_coverage",
    "estimate_signal_stats",
    "estimate_ase",
    "activity_fraction_empirical",
    "ris_in_cell_empirical",
]

MAX_RESAMPLE = 200
CHUNK = 256


class DegenerateRealizationError(RuntimeError):
    """No base station could be sampled after the retry budget."""


@dataclass(frozen=True)
class DropResult:
    sinr: float
    signal_power: float
    interference_power: float
    n_active_bs: int
    n_serving_ris: int
    d_serving: float
    i1_power: float
    i2_power: float
    d1_power: float
    d2_power: float


def _sample_disk(lam: float, radius: float, rng: np.random.Generator) -> np.ndarray:
    n = rng.poisson(lam * math.pi * radius * radius)
    r = radius * np.sqrt(rng.random(n))
    th = rng.random(n) * 2.0 * math.pi
    return np.column_stack((r * np.cos(th), r * np.sin(th)))


def _complex_fading(vs: int, rng: np.random.Generator, size) -> np.ndarray:
    amp = np.sqrt(rng.gamma(shape=vs, scale=1.0 / vs, size=size))
    return amp * np.exp(1j * rng.random(size) * 2.0 * math.pi)


def run_drop(cfg: ExperimentConfig, rng: np.random.Generator) -> DropResult:
    """Simulate one network drop and return the typical UE's SINR record."""
    vs, alpha, Q = cfg.fading.varsigma, cfg.fading.alpha, cfg.fading.Q
    P_tr, sig2 = cfg.power.P_tr, cfg.power.sigma_n2
    R = cfg.window_radius()

    bs = _sample_disk(cfg.lambda_active, R, rng)
    attempts = 0
    while bs.shape[0] == 0:
        attempts += 1
        if attempts > MAX_RESAMPLE:
            raise DegenerateRealizationError("no BS sampled after retry budget")
        bs = _sample_disk(cfg.lambda_active, R, rng)
    d_bs = np.hypot(bs[:, 0], bs[:, 1])
    s = int(np.argmin(d_bs))
    d_D = float(d_bs[s])

    h = _complex_fading(vs, rng, bs.shape[0])
    amp_D = (1.0 + d_D) ** (-alpha / 2.0)
    D1 = h[s] * amp_D

    D2 = 0.0 + 0.0j
    I2 = 0.0
    n_serving = 0
    ris = _sample_disk(cfg.lambda_m, R, rng) if cfg.lambda_m > 0 else np.zeros((0, 2))
    if ris.shape[0]:
        kappa = rng.random(ris.shape[0]) * 2.0 * math.pi
        d_ru = np.hypot(ris[:, 0], ris[:, 1])
        d2bs = np.hypot(ris[:, None, 0] - bs[None, :, 0], ris[:, None, 1] - bs[None, :, 1])
        nearest = np.argmin(d2bs, axis=1)
        d_is = d2bs[:, s]
        origin = np.zeros(2)
        beta_s = reflection_state_rays(ris, bs[s][None, :], origin[None, :], kappa).astype(bool)
        served = (nearest == s) & beta_s
        unserved_refl = beta_s & ~served
        n_serving = int(served.sum())

        amp_serv = (1.0 + d_ru) ** (-alpha / 2.0) * (1.0 + d_is) ** (-alpha / 2.0)
        if n_serving:
            if cfg.fast:
                stats = cascade_distribution(vs, Q, served=True)
                mods = np.maximum(
                    rng.normal(stats.mean_served, math.sqrt(stats.var_served), n_serving), 0.0
                )
            else:
                g = np.abs(_complex_fading(vs, rng, (n_serving, Q)))
                w = np.abs(_complex_fading(vs, rng, (n_serving, Q)))
                mods = (g * w).sum(axis=1)
            # matched phases align the whole served bundle with the direct link
            D2 += np.exp(1j * np.angle(h[s])) * float((mods * amp_serv[served]).sum())
        if unserved_refl.any():
            k = int(unserved_refl.sum())
            if cfg.fast:
                casc = (rng.standard_normal(k) + 1j * rng.standard_normal(k)) * math.sqrt(Q / 2.0)
            else:
                g = _complex_fading(vs, rng, (k, Q))
                w = _complex_fading(vs, rng, (k, Q))
                casc = (g * w).sum(axis=1)
            D2 += complex((casc * amp_serv[unserved_refl]).sum())

        if bs.shape[0] > 1:
            others = np.flatnonzero(np.arange(bs.shape[0]) != s)
            beta_io = np.zeros((ris.shape[0], others.size), dtype=bool)
            for j, bj in enumerate(others):
                beta_io[:, j] = reflection_state_rays(
                    ris, bs[bj][None, :], origin[None, :], kappa
                ).astype(bool)
            ii, jj = np.nonzero(beta_io)
            if ii.size:
                if cfg.fast:
                    pw = rng.exponential(float(Q), ii.size)
                else:
                    g = _complex_fading(vs, rng, (ii.size, Q))
                    w = _complex_fading(vs, rng, (ii.size, Q))
                    pw = np.abs((g * w).sum(axis=1)) ** 2
                I2 = float(
                    (pw / ((1.0 + d_ru[ii]) ** alpha * (1.0 + d2bs[ii, others[jj]]) ** alpha)).sum()
                )

    I1 = float((np.abs(h) ** 2 / (1.0 + d_bs) ** alpha).sum() - np.abs(h[s]) ** 2 * amp_D**2)
    signal = P_tr * abs(D1 + D2) ** 2
    interf = P_tr * (I1 + I2)
    sinr = signal / (interf + sig2)
    return DropResult(
        sinr=sinr,
        signal_power=signal,
        interference_power=interf,
        n_active_bs=bs.shape[0],
        n_serving_ris=n_serving,
        d_serving=d_D,
        i1_power=P_tr * I1,
        i2_power=P_tr * I2,
        d1_power=P_tr * abs(D1) ** 2,
        d2_power=P_tr * abs(D2) ** 2,
    )


_FIELDS = (
    "sinr",
    "signal_power",
    "interference_power",
    "n_active_bs",
    "n_serving_ris",
    "d_serving",
    "i1_power",
    "i2_power",
    "d1_power",
    "d2_power",
)


@dataclass(frozen=True)
class DropAccumulator:
    """Per-drop columns for ``n_drops`` drops, in drop-index order."""

    data: np.ndarray  # shape (n_drops, len(_FIELDS))

    def column(self, name: str) -> np.ndarray:
        return self.data[:, _FIELDS.index(name)]

    @property
    def sinr(self) -> np.ndarray:
        return self.column("sinr")


def _run_chunk(args) -> tuple[int, np.ndarray]:
    cfg, start, count = args
    out = np.empty((count, len(_FIELDS)))
    for k in range(count):
        rng = make_drop_rng(cfg.seed, start + k)
        res = run_drop(cfg, rng)
        out[k] = [getattr(res, f) for f in _FIELDS]
    return start, out


def simulate_drops(cfg: ExperimentConfig, n_drops: int | None = None, n_workers: int = 1) -> DropAccumulator:
    """Run ``n_drops`` independent drops; results identical for any worker count."""
    n = cfg.n_drops if n_drops is None else int(n_drops)
    if n < 1:
        raise ValueError("n_drops must be >= 1")
    chunks = [(cfg, start, min(CHUNK, n - start)) for start in range(0, n, CHUNK)]
    data = np.empty((n, len(_FIELDS)))
    if n_workers <= 1:
        results = map(_run_chunk, chunks)
    else:
        pool = ProcessPoolExecutor(max_workers=n_workers)
        try:
            results = list(pool.map(_run_chunk, chunks))
        finally:
            pool.shutdown()
    for start, block in results:
        data[start : start + block.shape[0]] = block
    return DropAccumulator(data=data)


def _run_moment_drop(cfg: ExperimentConfig, rng: np.random.Generator) -> tuple[float, ...]:
    """One drop with the fading integrated out analytically.

    Conditioned on the geometry, every channel moment in |D_sum|^2 and
    |I_sum|^2 has a closed form (means and second moments of Nakagami
    products), so averaging those instead of sampled channels estimates the
    same expectations with only point-process variance.  Used for the
    moment cross-checks where the straight estimator's heavy tail needs
    prohibitively many drops.
    """
    vs, alpha, Q = cfg.fading.varsigma, cfg.fading.alpha, cfg.fading.Q
    P_tr = cfg.power.P_tr
    R = cfg.window_radius()
    stats = cascade_distribution(vs, Q, served=True)
    mean_s, var_s = stats.mean_served, stats.var_served
    e_s2 = var_s + mean_s**2
    nu = math.gamma(vs + 0.5) / (math.sqrt(vs) * math.gamma(vs))

    bs = _sample_disk(cfg.lambda_active, R, rng)
    attempts = 0
    while bs.shape[0] == 0:
        attempts += 1
        if attempts > MAX_RESAMPLE:
            raise DegenerateRealizationError("no BS sampled after retry budget")
        bs = _sample_disk(cfg.lambda_active, R, rng)
    d_bs = np.hypot(bs[:, 0], bs[:, 1])
    s = int(np.argmin(d_bs))
    d_D = float(d_bs[s])
    pl_d = (1.0 + d_D) ** (-alpha)

    d1 = pl_d
    cross = coh2 = inc = i2 = 0.0
    n_serving = 0
    ris = _sample_disk(cfg.lambda_m, R, rng) if cfg.lambda_m > 0 else np.zeros((0, 2))
    if ris.shape[0]:
        kappa = rng.random(ris.shape[0]) * 2.0 * math.pi
        d_ru = np.hypot(ris[:, 0], ris[:, 1])
        d2bs = np.hypot(ris[:, None, 0] - bs[None, :, 0], ris[:, None, 1] - bs[None, :, 1])
        nearest = np.argmin(d2bs, axis=1)
        d_is = d2bs[:, s]
        origin = np.zeros(2)
        beta_s = reflection_state_rays(ris, bs[s][None, :], origin[None, :], kappa).astype(bool)
        served = (nearest == s) & beta_s
        unserved_refl = beta_s & ~served
        n_serving = int(served.sum())
        amp = (1.0 + d_ru) ** (-alpha / 2.0) * (1.0 + d_is) ** (-alpha / 2.0)
        a_srv = amp[served]
        cross = 2.0 * nu * mean_s * math.sqrt(pl_d) * float(a_srv.sum())
        coh2 = e_s2 * float((a_srv**2).sum()) + mean_s**2 * (
            float(a_srv.sum()) ** 2 - float((a_srv**2).sum())
        )
        inc = float(Q) * float((amp[unserved_refl] ** 2).sum())
        if bs.shape[0] > 1:
            others = np.flatnonzero(np.arange(bs.shape[0]) != s)
            for bj in others:
                b_io = reflection_state_rays(ris, bs[bj][None, :], origin[None, :], kappa).astype(bool)
                if b_io.any():
                    i2 += float(Q) * float(
                        (1.0 / ((1.0 + d_ru[b_io]) ** alpha * (1.0 + d2bs[b_io, bj]) ** alpha)).sum()
                    )
    i1 = float((1.0 / (1.0 + d_bs) ** alpha).sum()) - pl_d
    signal = P_tr * (d1 + cross + coh2 + inc)
    interf = P_tr * (i1 + i2)
    return (
        signal / (interf + cfg.power.sigma_n2),
        signal,
        interf,
        bs.shape[0],
        n_serving,
        d_D,
        P_tr * i1,
        P_tr * i2,
        P_tr * d1,
        P_tr * (cross + coh2 + inc),
    )


def _run_moment_chunk(args) -> tuple[int, np.ndarray]:
    cfg, start, count = args
    out = np.empty((count, len(_FIELDS)))
    for k in range(count):
        rng = make_drop_rng(cfg.seed, start + k)
        out[k] = _run_moment_drop(cfg, rng)
    return start, out


def simulate_moment_drops(cfg: ExperimentConfig, n_drops: int | None = None,
                          n_workers: int = 1) -> DropAccumulator:
    """Channel-averaged drops (see ``_run_moment_drop``); same column layout,
    but the sinr column is a ratio of conditional means, not a SINR sample."""
    n = cfg.n_drops if n_drops is None else int(n_drops)
    if n < 1:
        raise ValueError("n_drops must be >= 1")
    chunks = [(cfg, start, min(CHUNK, n - start)) for start in range(0, n, CHUNK)]
    data = np.empty((n, len(_FIELDS)))
    if n_workers <= 1:
        results = map(_run_moment_chunk, chunks)
    else:
        pool = ProcessPoolExecutor(max_workers=n_workers)
        try:
            results = list(pool.map(_run_moment_chunk, chunks))
        finally:
            pool.shutdown()
    for start, block in results:
        data[start : start + block.shape[0]] = block
    return DropAccumulator(data=data)


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float, float]:
    """Wilson score interval; returns (estimate, low, high)."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return phat, max(0.0, center - half), min(1.0, center + half)


def estimate_coverage(cfg: ExperimentConfig, delta: float, n_drops: int | None = None,
                      acc: DropAccumulator | None = None, n_workers: int = 1):
    """Fraction of drops with SINR >= delta, with a 95% Wilson interval."""
    if delta <= 0:
        raise ValueError("delta must be > 0 (linear)")
    if acc is None:
        acc = simulate_drops(cfg, n_drops, n_workers)
    hits = int((acc.sinr >= delta).sum())
    return wilson_interval(hits, acc.sinr.size)


def _mean_ci(x: np.ndarray, z: float = 1.96) -> tuple[float, float]:
    m = float(np.mean(x))
    half = z * float(np.std(x, ddof=1)) / math.sqrt(x.size) if x.size > 1 else 0.0
    return m, half


def estimate_signal_stats(cfg: ExperimentConfig, n_drops: int | None = None,
                          acc: DropAccumulator | None = None, n_workers: int = 1) -> dict:
    """Sample means (with 95% CIs) of signal and interference power."""
    if acc is None:
        acc = simulate_drops(cfg, n_drops, n_workers)
    out = {}
    for key, col in (
        ("signal_power", "signal_power"),
        ("interference_power", "interference_power"),
        ("i1_power", "i1_power"),
        ("i2_power", "i2_power"),
        ("d1_power", "d1_power"),
        ("d2_power", "d2_power"),
    ):
        out[key], out[key + "_ci"] = _mean_ci(acc.column(col))
    return out


def estimate_ase(cfg: ExperimentConfig, n_drops: int | None = None,
                 acc: DropAccumulator | None = None, n_workers: int = 1) -> tuple[float, float]:
    """Area spectral efficiency lambda_active * E[log2(1 + SINR)] with 95% CI."""
    if acc is None:
        acc = simulate_drops(cfg, n_drops, n_workers)
    rate = np.log2(1.0 + acc.sinr)
    m, half = _mean_ci(rate)
    return cfg.lambda_active * m, cfg.lambda_active * half


def activity_fraction_empirical(lambda_n: float, lambda_u: float, radius: float,
                                n_drops: int, seed: int = 0, guard: float | None = None) -> float:
    """Fraction of BSs with >= 1 associated UE, measured on interior BSs only.

    Exercises the exact association rule (not the thinning shortcut); edge
    BSs are excluded because UEs outside the window cannot vote for them.
    """
    if guard is None:
        guard = 2.0 / math.sqrt(max(lambda_n, 1e-12))
    active = 0
    total = 0
    for i in range(n_drops):
        rng = make_drop_rng(seed, i)
        bs = _sample_disk(lambda_n, radius, rng)
        ue = _sample_disk(lambda_u, radius, rng)
        if bs.shape[0] == 0:
            continue
        interior = np.hypot(bs[:, 0], bs[:, 1]) <= radius - guard
        if not interior.any():
            continue
        has_ue = np.zeros(bs.shape[0], dtype=bool)
        if ue.shape[0]:
            idx = associate_nearest(ue, bs)
            has_ue[np.unique(idx)] = True
        active += int(has_ue[interior].sum())
        total += int(interior.sum())
    if total == 0:
        raise RuntimeError("no interior BS sampled")
    return active / total


def ris_in_cell_empirical(lambda_active: float, lambda_m: float, d_bins: np.ndarray,
                          n_drops: int, seed: int = 0, guard_factor: float = 5.0) -> tuple[np.ndarray, np.ndarray]:
    """Empirical P[RIS's nearest active BS is the typical (serving) BS | d_I bin].

    The typical BS is the serving BS of the typical UE at the origin.  Probe
    RISs are placed at controlled distances from it (uniform direction), one
    per bin per drop, which measures the same conditional law as binning a
    PPP of RISs but with even bin occupancy.
    """
    R = guard_factor / math.sqrt(math.pi * lambda_active)
    mids = 0.5 * (d_bins[1:] + d_bins[:-1])
    hits = np.zeros(mids.size)
    tot = np.zeros(mids.size)
    for i in range(n_drops):
        rng = make_drop_rng(seed, i)
        bs = _sample_disk(lambda_active, R, rng)
        if bs.shape[0] == 0:
            continue
        d_bs = np.hypot(bs[:, 0], bs[:, 1])
        s = int(np.argmin(d_bs))
        if d_bs[s] > R / 4:
            continue
        ang = rng.random(mids.size) * 2.0 * math.pi
        probes = bs[s][None, :] + np.column_stack((mids * np.cos(ang), mids * np.sin(ang)))
        dd = np.hypot(probes[:, None, 0] - bs[None, :, 0], probes[:, None, 1] - bs[None, :, 1])
        nearest_is_s = np.argmin(dd, axis=1) == s
        tot += 1
        hits += nearest_is_s
    return mids, hits / np.maximum(tot, 1)
