"""Homogeneous PPP sampling on a disk and intensity-level laws.

Points are generated in polar form by radial generation: the polar radius
has density f(x) = 2x/R^2 on [0, R] (so r = R*sqrt(U)) and the angle is
uniform on [0, 2pi); counts are Poisson with mean intensity*pi*R^2.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gamma as gamma_fn, gammaincc

from .config import PointProcessConfig

__all__ = [
    "PolarPoints",
    "NetworkRealization",
    "sample_hppp",
    "voronoi_area_pdf",
    "active_bs_probability",
    "ris_in_cell_probability",
    "make_drop_rng",
    "realization_to_json",
    "realization_from_json",
]

GAMMA_35 = float(gamma_fn(3.5))  # 3.3233509704478426


@dataclass(frozen=True)
class PolarPoints:
    """A set of points in polar coordinates (vectorized PolarPoint)."""

    r: np.ndarray
    theta: np.ndarray

    def __post_init__(self):
        if self.r.shape != self.theta.shape:
            raise ValueError("r and theta must have the same shape")

    def __len__(self) -> int:
        return self.r.shape[0]

    @property
    def xy(self) -> np.ndarray:
        return np.column_stack((self.r * np.cos(self.theta), self.r * np.sin(self.theta)))


@dataclass(frozen=True)
class NetworkRealization:
    """One sampled drop of the three processes plus RIS placement angles."""

    bs: PolarPoints
    ris: PolarPoints
    kappa: np.ndarray
    ue: PolarPoints
    radius_R: float

    def __post_init__(self):
        if len(self.ris) != self.kappa.shape[0]:
            raise ValueError("kappa must have one entry per RIS")


def sample_hppp(lam: float, radius_R: float, rng: np.random.Generator) -> PolarPoints:
    """Sample a homogeneous PPP of intensity ``lam`` on a disk of radius ``radius_R``."""
    if lam < 0:
        raise ValueError("intensity must be >= 0")
    if radius_R <= 0:
        raise ValueError("radius_R must be > 0")
    n = rng.poisson(lam * math.pi * radius_R**2)
    r = radius_R * np.sqrt(rng.random(n))
    theta = rng.random(n) * 2.0 * math.pi
    return PolarPoints(r=r, theta=theta)


def sample_realization(cfg: PointProcessConfig, rng: np.random.Generator) -> NetworkRealization:
    bs = sample_hppp(cfg.lambda_n, cfg.radius_R, rng)
    ris = sample_hppp(cfg.lambda_m, cfg.radius_R, rng)
    kappa = rng.random(len(ris)) * 2.0 * math.pi
    ue = sample_hppp(cfg.lambda_u, cfg.radius_R, rng)
    return NetworkRealization(bs=bs, ris=ris, kappa=kappa, ue=ue, radius_R=cfg.radius_R)


def voronoi_area_pdf(x_b) -> np.ndarray | float:
    """Density of the normalized Voronoi cell area: 3.5^3.5/Gamma(3.5) * x^2.5 * exp(-3.5x)."""
    x = np.asarray(x_b, dtype=float)
    if np.any(x < 0):
        raise ValueError("x_b must be >= 0")
    out = (3.5**3.5 / GAMMA_35) * x**2.5 * np.exp(-3.5 * x)
    return out if out.ndim else float(out)


def active_bs_probability(lambda_u: float, lambda_n: float) -> tuple[float, float]:
    """Probability that a BS has at least one associated UE, and the active intensity.

    Returns ``(p_active, lambda_active)`` with
    p_active = 1 - (1 + lambda_u/(3.5*lambda_n))^(-3.5).
    """
    if lambda_u < 0:
        raise ValueError("lambda_u must be >= 0")
    if lambda_n <= 0:
        raise ValueError("lambda_n must be > 0")
    p = 1.0 - (1.0 + lambda_u / (3.5 * lambda_n)) ** (-3.5)
    return p, p * lambda_n


def ris_in_cell_probability(lambda_active: float, d_i, exact_coefficient: bool = True):
    """Gilbert-disk probability that a RIS at distance ``d_i`` lies in the typical cell.

    p = c * Gamma(3.5, 3.5*pi*lambda_active*d_i^2).  The published constant
    0.3 is a rounding of 1/Gamma(3.5) ~ 0.30090; the exact coefficient makes
    p(lambda, 0) = 1 and is the default, the literal 0.3 is kept behind the
    flag for faithful reproduction.
    """
    if lambda_active <= 0:
        raise ValueError("lambda_active must be > 0")
    d = np.asarray(d_i, dtype=float)
    if np.any(d < 0):
        raise ValueError("d_i must be >= 0")
    c = 1.0 / GAMMA_35 if exact_coefficient else 0.3
    out = c * gammaincc(3.5, 3.5 * math.pi * lambda_active * d**2) * GAMMA_35
    return out if out.ndim else float(out)


def make_drop_rng(master_seed: int, drop_index: int) -> np.random.Generator:
    """Per-drop substream: one master seed, counter-derived children.

    Worker-count independent: the stream for drop ``i`` depends only on
    ``(master_seed, i)``, so serial and parallel runs agree bit-for-bit.
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((master_seed, drop_index))))


def realization_to_json(real: NetworkRealization, extra: Optional[dict] = None) -> str:
    """Serialize a realization to the documented JSON schema (see README)."""
    doc = {
        "schema": "risudn-realization-v1",
        "radius": real.radius_R,
        "bs": np.column_stack((real.bs.r, real.bs.theta)).tolist(),
        "ris": np.column_stack((real.ris.r, real.ris.theta, real.kappa)).tolist(),
        "ue": np.column_stack((real.ue.r, real.ue.theta)).tolist(),
    }
    if extra:
        doc.update(extra)
    return json.dumps(doc)


def realization_from_json(text: str) -> NetworkRealization:
    doc = json.loads(text)
    if doc.get("schema") != "risudn-realization-v1":
        raise ValueError("unknown realization schema")
    bs = np.asarray(doc["bs"], dtype=float).reshape(-1, 2)
    ris = np.asarray(doc["ris"], dtype=float).reshape(-1, 3)
    ue = np.asarray(doc["ue"], dtype=float).reshape(-1, 2)
    return NetworkRealization(
        bs=PolarPoints(bs[:, 0], bs[:, 1]),
        ris=PolarPoints(ris[:, 0], ris[:, 1]),
        kappa=ris[:, 2],
        ue=PolarPoints(ue[:, 0], ue[:, 1]),
        radius_R=float(doc["radius"]),
    )
