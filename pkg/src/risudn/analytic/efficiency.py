"""Area energy efficiency and energy coverage efficiency.

Both divide a rate/coverage figure by the area power density
l'(dp*P_tr + P_ns) + l_m(Q*P_md + P_ms).
"""
from __future__ import annotations

from ..config import PowerModel

__all__ = ["aee", "ece"]


def _power_density(lambda_active: float, lambda_m: float, Q: int, power: PowerModel) -> float:
    dens = power.area_power_density(lambda_active, lambda_m, Q)
    if dens <= 0:
        raise ValueError("area power density must be > 0")
    return dens


def aee(ase_value: float, lambda_active: float, lambda_m: float, Q: int,
        power: PowerModel) -> float:
    """Area energy efficiency: ASE per unit-area power consumption (bits/Joule/area)."""
    return ase_value / _power_density(lambda_active, lambda_m, Q, power)


def ece(coverage_value: float, lambda_active: float, lambda_m: float, Q: int,
        power: PowerModel) -> float:
    """Energy coverage efficiency: coverage probability per unit-area power (area/Watt)."""
    return coverage_value / _power_density(lambda_active, lambda_m, Q, power)
