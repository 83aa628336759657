"""Special functionals: incomplete gamma, the F/G/Q integrals, and the
geometry weights shared by the moment and coverage functionals.

Two weight modes exist everywhere a triangle is integrated out:

* ``literal`` - the published reading: reflection weight (pi - t)/(2*pi)
  taken at the integration angle itself, in-cell weight from the
  Gilbert-disk law.
* ``exact`` - reflection weight evaluated at the true RIS vertex angle of
  the reconstructed triangle, in-cell weight from the void law conditioned
  on the serving exclusion disk (two-circle lens).

The ``exact`` mode is the default engine; ``literal`` reproduces the
published curves.  Both keep the same functional structure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate
from scipy.special import gamma as gamma_fn, gammaincc

from ..ppp import ris_in_cell_probability

__all__ = [
    "gauss_legendre",
    "graded_angle_grid",
    "upper_incomplete_gamma",
    "func_F",
    "func_G",
    "func_Q",
    "beta_integral",
    "lens_area",
    "TriangleGrid",
]


@lru_cache(maxsize=64)
def _leggauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def gauss_legendre(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = _leggauss(n)
    return 0.5 * (x + 1.0) * (b - a) + a, 0.5 * (b - a) * w


def graded_angle_grid(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes on [0, pi] clustered near 0 (theta = pi*s^2) for near-collinear kernels."""
    s, ws = gauss_legendre(0.0, 1.0, n)
    return math.pi * s * s, ws * 2.0 * math.pi * s


def upper_incomplete_gamma(a: float, x: float) -> float:
    """Gamma(a, x) = int_x^inf t^(a-1) e^(-t) dt (unregularized)."""
    if a <= 0:
        raise ValueError("shape a must be > 0")
    if x < 0:
        raise ValueError("lower limit x must be >= 0")
    return float(gammaincc(a, x) * gamma_fn(a))


def beta_integral(alpha: float) -> float:
    """int_0^inf x (1+x)^(-alpha) dx = B(2, alpha-2); equals 1/6 at alpha=4."""
    if alpha <= 2:
        raise ValueError("alpha must be > 2 for convergence")
    return float(gamma_fn(2) * gamma_fn(alpha - 2) / gamma_fn(alpha))


def func_F(a: float, k: float) -> float:
    """F(a, k) = int_0^inf x (1+x)^(-a) exp(-k x^2) dx."""
    if k < 0:
        raise ValueError("k must be >= 0")
    if a <= 2 and k == 0:
        raise ValueError("divergent: a <= 2 with k = 0")
    val, _ = integrate.quad(
        lambda x: x * (1.0 + x) ** (-a) * math.exp(-k * x * x), 0.0, np.inf, limit=200
    )
    return float(val)


def func_G(integrand, n_nodes: int = 256) -> float:
    """G(f) = int_0^pi [(pi - t)/(2*pi)] * (1/pi) * f(t) dt.

    The weight is the conditional reflection probability at the integration
    angle times the folded-uniform angle density.
    """
    t, w = gauss_legendre(0.0, math.pi, n_nodes)
    vals = np.asarray(integrand(t), dtype=float)
    weight = (math.pi - t) / (2.0 * math.pi) / math.pi
    return float(np.sum(weight * vals * w))


def lens_area(r1, r2, d):
    """Area of the intersection of two discs with radii r1, r2 and center distance d."""
    r1 = np.asarray(r1, dtype=float)
    r2 = np.asarray(r2, dtype=float)
    d = np.asarray(d, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        al = np.arccos(np.clip((d * d + r1 * r1 - r2 * r2) / (2.0 * d * r1 + 1e-300), -1.0, 1.0))
        be = np.arccos(np.clip((d * d + r2 * r2 - r1 * r1) / (2.0 * d * r2 + 1e-300), -1.0, 1.0))
        hero = (r1 + r2 - d) * (d + r1 - r2) * (d - r1 + r2) * (d + r1 + r2)
        gen = r1 * r1 * al + r2 * r2 * be - 0.5 * np.sqrt(np.clip(hero, 0.0, None))
    small = np.pi * np.minimum(r1, r2) ** 2
    return np.where(d >= r1 + r2, 0.0, np.where(d <= np.abs(r1 - r2), small, gen))


@dataclass(frozen=True)
class TriangleGrid:
    """Tensorized (d_I, angle) grid around an anchor BS at distance d_anchor
    from the UE, with the third side and weights precomputed.

    Shapes: d_i (n_radial, 1), theta (1, n_angle), everything else broadcast
    to (n_radial, n_angle).  The angle measure is the folded-uniform density
    dt/pi; the radial Campbell measure d_i*dd_i is left to the caller.
    """

    d_i: np.ndarray
    w_i: np.ndarray
    theta: np.ndarray
    w_th: np.ndarray
    d_r: np.ndarray
    refl_weight: np.ndarray
    d_anchor: float

    @classmethod
    def build(cls, d_anchor: float, mode: str, n_radial: int, n_angle: int,
              r_max: float) -> "TriangleGrid":
        di, wi = gauss_legendre(0.0, r_max, n_radial)
        th, wth = graded_angle_grid(n_angle)
        dI = di[:, None]
        T = th[None, :]
        dR = np.sqrt(np.maximum(d_anchor**2 + dI**2 - 2.0 * d_anchor * dI * np.cos(T), 0.0))
        if mode == "literal":
            w_refl = np.broadcast_to((math.pi - T) / (2.0 * math.pi), dR.shape)
        elif mode == "exact":
            den = 2.0 * dR * dI
            ang = np.arccos(
                np.clip(
                    np.where(den > 0, (dR**2 + dI**2 - d_anchor**2) / np.where(den > 0, den, 1.0), 1.0),
                    -1.0,
                    1.0,
                )
            )
            w_refl = (math.pi - ang) / (2.0 * math.pi)
        else:
            raise ValueError(f"unknown geometry mode {mode!r}")
        return cls(d_i=dI, w_i=wi, theta=T, w_th=wth, d_r=dR,
                   refl_weight=np.ascontiguousarray(w_refl), d_anchor=d_anchor)

    def in_cell_weight(self, lambda_active: float, mode: str, d_ue_anchor: float | None = None) -> np.ndarray:
        """P[the anchor BS is the RIS's nearest active BS] on the grid."""
        if mode == "literal":
            p = ris_in_cell_probability(lambda_active, self.d_i[:, 0])
            return np.broadcast_to(p[:, None], self.d_r.shape)
        d_ue = self.d_anchor if d_ue_anchor is None else d_ue_anchor
        dI = np.broadcast_to(self.d_i, self.d_r.shape)
        excl = np.pi * dI**2 - lens_area(dI, np.full_like(dI, d_ue), self.d_r)
        return np.exp(-lambda_active * np.maximum(excl, 0.0))

    def angle_average(self, vals: np.ndarray) -> np.ndarray:
        """Integrate over the angle with the folded-uniform density dt/pi."""
        return vals @ (self.w_th / math.pi)

    def radial_integral(self, per_radius: np.ndarray) -> float:
        """Campbell radial integral int f(d_i) d_i dd_i."""
        return float(np.sum(per_radius * self.d_i[:, 0] * self.w_i))


def func_Q(kind: str, alpha: float, d_d: float, lambda_active: float,
           mode: str = "literal", n_radial: int = 200, n_angle: int = 80,
           r_max: float | None = None) -> float:
    """The Q functional: radial Campbell integral around the anchor BS of the
    angle-averaged reflection-weighted kernel (1+d_R)^(-alpha)(1+d_I)^(-alpha),
    with kind-selected in-cell weight 1, p, or 1-p.

    The third side d_R is reconstructed from (d_d, d_I, angle) by the law of
    cosines; ``mode`` picks the weight variant (see module docstring).
    """
    if alpha <= 2:
        raise ValueError("alpha must be > 2 for convergence")
    if d_d < 0:
        raise ValueError("d_d must be >= 0")
    if kind not in ("1", "p", "1-p"):
        raise ValueError("kind must be one of '1', 'p', '1-p'")
    if r_max is None:
        r_max = 40.0 / math.sqrt(math.pi * lambda_active) if lambda_active > 0 else 400.0
        r_max = max(r_max, 4.0 * d_d + 40.0)
    grid = TriangleGrid.build(d_d, mode, n_radial, n_angle, r_max)
    kern = (1.0 + grid.d_r) ** (-alpha) * (1.0 + np.broadcast_to(grid.d_i, grid.d_r.shape)) ** (-alpha)
    if kind == "1":
        w3 = 1.0
    else:
        p = grid.in_cell_weight(lambda_active, mode)
        w3 = p if kind == "p" else 1.0 - p
    per_radius = grid.angle_average(grid.refl_weight * kern * w3)
    return grid.radial_integral(per_radius)
