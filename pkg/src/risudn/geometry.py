"""Association structure, BS-RIS-UE triangles, and the reflection state.

Angle conventions: vertex angles live in [0, pi] (the law of cosines only
sees the cosine, so angular differences are folded); the RIS polar angle
``theta_m`` is measured in the frame centered on the triangle's BS.  The
one-sided panel reflects A -> B iff the placement angle admits both rays,
which for uniform placement gives P[reflect | vertex angle] =
(pi - angle)/(2*pi).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TriangleBRU",
    "associate_nearest",
    "build_triangle",
    "reflection_state",
    "reflection_state_rays",
    "reflection_prob_given_angle",
    "nearest_bs_distance_pdf",
    "vertex_angle",
]

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class TriangleBRU:
    """One BS-RIS-UE triangle: three sides, two vertex angles, BS-frame RIS angle."""

    d_D: float
    d_I: float
    d_R: float
    dtheta_U: float
    dtheta_M: float
    theta_m: float

    def law_of_cosines_residual(self) -> float:
        lhs = self.d_I**2
        rhs = self.d_D**2 + self.d_R**2 - 2.0 * self.d_D * self.d_R * math.cos(self.dtheta_U)
        scale = max(lhs, rhs, 1.0)
        return abs(lhs - rhs) / scale


def associate_nearest(points_xy: np.ndarray, anchors_xy: np.ndarray) -> np.ndarray:
    """Index of the nearest anchor for every point; ties break to the lowest index."""
    anchors_xy = np.atleast_2d(anchors_xy)
    if anchors_xy.shape[0] == 0:
        raise ValueError("anchor list must be non-empty")
    points_xy = np.atleast_2d(points_xy)
    if points_xy.shape[0] == 0:
        return np.zeros(0, dtype=np.intp)
    d2 = ((points_xy[:, None, :] - anchors_xy[None, :, :]) ** 2).sum(axis=2)
    return np.argmin(d2, axis=1)  # argmin returns the first minimum


def vertex_angle(a2: np.ndarray, b2: np.ndarray, c2: np.ndarray) -> np.ndarray:
    """Angle opposite side sqrt(c2) in a triangle with squared sides a2, b2, c2.

    Degenerate vertices (a zero-length adjacent side) return 0 by convention.
    """
    denom = 2.0 * np.sqrt(a2 * b2)
    with np.errstate(invalid="ignore", divide="ignore"):
        cosv = np.where(denom > 0, (a2 + b2 - c2) / np.where(denom > 0, denom, 1.0), 1.0)
    return np.arccos(np.clip(cosv, -1.0, 1.0))


def build_triangle(bs_xy, ris_xy, ue_xy) -> TriangleBRU:
    """Construct the triangle record from Cartesian positions."""
    bs = np.asarray(bs_xy, dtype=float)
    ris = np.asarray(ris_xy, dtype=float)
    ue = np.asarray(ue_xy, dtype=float)
    d_D = float(np.hypot(*(bs - ue)))
    d_I = float(np.hypot(*(ris - bs)))
    d_R = float(np.hypot(*(ris - ue)))
    dtheta_U = float(vertex_angle(np.asarray(d_D**2), np.asarray(d_R**2), np.asarray(d_I**2)))
    dtheta_M = float(vertex_angle(np.asarray(d_R**2), np.asarray(d_I**2), np.asarray(d_D**2)))
    theta_m = float(np.mod(math.atan2(ris[1] - bs[1], ris[0] - bs[0]), TWO_PI))
    return TriangleBRU(d_D=d_D, d_I=d_I, d_R=d_R, dtheta_U=dtheta_U, dtheta_M=dtheta_M, theta_m=theta_m)


def reflection_state(kappa, theta_m, dtheta_M) -> np.ndarray | int:
    """Literal interval form of the reflection state.

    Returns 1 iff kappa (mod 2pi) lies in the closed arc from -theta_m to
    pi - dtheta_M - theta_m, walked counterclockwise; the arc length is
    pi - dtheta_M, so the marginal over uniform kappa matches
    (pi - dtheta_M)/(2*pi).  When the nominal end precedes the start
    (dtheta_M > pi after folding) the state is 0.
    """
    kap = np.mod(np.asarray(kappa, dtype=float), TWO_PI)
    th = np.asarray(theta_m, dtype=float)
    dm = np.asarray(dtheta_M, dtype=float)
    arc = np.pi - dm
    pos = np.mod(kap + th, TWO_PI)  # position measured from the arc start
    out = np.where(arc >= 0, (pos <= arc) | (np.abs(pos - TWO_PI) < 1e-12), False).astype(int)
    return out if out.ndim else int(out)


def reflection_state_rays(ris_xy: np.ndarray, a_xy: np.ndarray, b_xy: np.ndarray, kappa) -> np.ndarray:
    """Frame-free reflection state: both rays (to A and to B) on the panel's open side.

    This is the geometric reading used by the simulator for arbitrary
    (BS, RIS, UE) triples; for uniform kappa it has the same conditional
    law (pi - vertex angle)/(2*pi) as the interval form.
    """
    ph_a = np.arctan2(a_xy[..., 1] - ris_xy[..., 1], a_xy[..., 0] - ris_xy[..., 0])
    ph_b = np.arctan2(b_xy[..., 1] - ris_xy[..., 1], b_xy[..., 0] - ris_xy[..., 0])
    ka = np.asarray(kappa, dtype=float)
    return ((np.mod(ph_a - ka, TWO_PI) <= np.pi) & (np.mod(ph_b - ka, TWO_PI) <= np.pi)).astype(int)


def reflection_prob_given_angle(dtheta_M) -> np.ndarray | float:
    """Conditional reflection probability (pi - dtheta_M)/(2*pi); at most 1/2."""
    dm = np.asarray(dtheta_M, dtype=float)
    if np.any((dm < -1e-12) | (dm > math.pi + 1e-12)):
        raise ValueError("dtheta_M must lie in [0, pi]")
    out = (math.pi - dm) / TWO_PI
    return out if out.ndim else float(out)


def nearest_bs_distance_pdf(d, lambda_active: float):
    """Nearest-active-BS distance density 2*pi*lam*d*exp(-pi*lam*d^2)."""
    if lambda_active <= 0:
        raise ValueError("lambda_active must be > 0")
    dd = np.asarray(d, dtype=float)
    if np.any(dd < 0):
        raise ValueError("d must be >= 0")
    out = 2.0 * math.pi * lambda_active * dd * np.exp(-math.pi * lambda_active * dd**2)
    return out if out.ndim else float(out)
