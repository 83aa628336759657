"""Independent brute-force oracles used by the test suite.

Everything here is deliberately written from scratch against the model
definitions (no imports from the package's analytic internals beyond plain
config types), so agreement is evidence rather than tautology.
"""
from __future__ import annotations

import math

import numpy as np


# --------------------------------------------------------- binary UDN oracle

def binary_udn_mc(lambda_bs: float, varsigma: int, alpha: float, P_tr: float,
                  sigma_n2: float, n_drops: int, seed: int,
                  window_factor: float = 6.0) -> np.ndarray:
    """Classical (no-RIS) downlink UDN Monte Carlo: SINR samples of a typical
    user at the origin under nearest-BS association, Nakagami fading, and
    (1+d)^-alpha path loss.  Straightforward independent implementation."""
    rng = np.random.default_rng(seed)
    R = window_factor / math.sqrt(math.pi * lambda_bs)
    mean_n = lambda_bs * math.pi * R * R
    sinr = np.empty(n_drops)
    for i in range(n_drops):
        n = rng.poisson(mean_n)
        while n == 0:
            n = rng.poisson(mean_n)
        d = R * np.sqrt(rng.random(n))
        g = rng.gamma(shape=varsigma, scale=1.0 / varsigma, size=n)  # |h|^2
        k = int(np.argmin(d))
        pl = (1.0 + d) ** (-alpha)
        sig = P_tr * g[k] * pl[k]
        interf = P_tr * (np.sum(g * pl) - g[k] * pl[k])
        sinr[i] = sig / (interf + sigma_n2)
    return sinr


# ------------------------------------------------- paired-process oracles

def paired_realizations(lambda_n: float, lambda_m: float, radius: float,
                        n_drops: int, seed: int):
    """Yield (radii_n, radii_m) for independent PPPs on a disk."""
    rng = np.random.default_rng(seed)
    area = math.pi * radius * radius
    for _ in range(n_drops):
        rn = radius * np.sqrt(rng.random(rng.poisson(lambda_n * area)))
        rm = radius * np.sqrt(rng.random(rng.poisson(lambda_m * area)))
        yield rn, rm


def double_sum_mc(f, lambda_n: float, lambda_m: float, radius: float,
                  n_drops: int, seed: int, separable=None) -> float:
    """Brute-force E[sum_n sum_m f(x_n, y_m)] over paired realizations.

    ``separable=(a, b)`` computes the identical double sum as
    (sum a(x))(sum b(y)) when f(x, y) = a(x) b(y); exact, just O(N+M).
    """
    total = 0.0
    for rn, rm in paired_realizations(lambda_n, lambda_m, radius, n_drops, seed):
        if rn.size == 0 or rm.size == 0:
            continue
        if separable is not None:
            a, b = separable
            total += float(np.sum(a(rn)) * np.sum(b(rm)))
        else:
            total += float(np.sum(f(rn[:, None], rm[None, :])))
    return total / n_drops


def double_product_mc(f, lambda_n: float, lambda_m: float, radius: float,
                      n_drops: int, seed: int) -> float:
    """Brute-force E[prod_n prod_m f(x_n, y_m)] over paired realizations."""
    total = 0.0
    for rn, rm in paired_realizations(lambda_n, lambda_m, radius, n_drops, seed):
        if rn.size == 0 or rm.size == 0:
            total += 1.0
            continue
        logs = np.log(np.maximum(f(rn[:, None], rm[None, :]), 1e-300))
        total += math.exp(float(np.sum(logs)))
    return total / n_drops


# ------------------------------------------------------ integral MC oracles

def func_f_mc(a: float, k: float, n_samples: int, seed: int) -> float:
    """Importance-sampled int_0^inf x (1+x)^-a exp(-k x^2) dx.

    Samples x from Exp(rate), weights by the rest of the integrand.
    """
    rng = np.random.default_rng(seed)
    rate = 0.5
    x = rng.exponential(1.0 / rate, n_samples)
    w = x * (1.0 + x) ** (-a) * np.exp(-k * x * x) / (rate * np.exp(-rate * x))
    return float(np.mean(w))


def func_q_mc(alpha: float, d_d: float, n_samples: int, seed: int,
              lambda_active: float | None = None, kind: str = "1",
              mode: str = "literal") -> float:
    """MC estimate of the Q functional's double integral (d_I outer, angle inner).

    d_I sampled from Exp, theta uniform on [0, pi]; the reflection weight and
    optional in-cell weight are applied per the selected reading.
    """
    from scipy.special import gammaincc

    rng = np.random.default_rng(seed)
    rate = 0.25
    di = rng.exponential(1.0 / rate, n_samples)
    th = rng.random(n_samples) * math.pi
    dr = np.sqrt(d_d**2 + di**2 - 2.0 * d_d * di * np.cos(th))
    if mode == "literal":
        wref = (math.pi - th) / (2.0 * math.pi)
    else:
        den = 2.0 * dr * di
        ang = np.arccos(np.clip(np.where(den > 0, (dr**2 + di**2 - d_d**2) / np.where(den > 0, den, 1.0), 1.0), -1, 1))
        wref = (math.pi - ang) / (2.0 * math.pi)
    kern = (1.0 + dr) ** (-alpha) * (1.0 + di) ** (-alpha)
    if kind == "1":
        w3 = 1.0
    else:
        p = gammaincc(3.5, 3.5 * math.pi * lambda_active * di**2)
        w3 = p if kind == "p" else 1.0 - p
    # angle integral carries density 1/pi over [0, pi]; we sampled uniformly
    vals = wref * kern * w3 * di / (rate * np.exp(-rate * di))
    return float(np.mean(vals))


def laplace_transform_mc(samples: np.ndarray, s_values: np.ndarray) -> np.ndarray:
    """Empirical Laplace transform E[exp(-s X)] of sampled variables."""
    return np.exp(-np.outer(s_values, samples)).mean(axis=1)
