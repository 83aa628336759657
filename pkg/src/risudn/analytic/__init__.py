"""Numerical-analytic engine: special functionals, ternary Campbell/PGFL,
signal and interference moments, coverage, rate, and energy metrics."""
from .special import (
    upper_incomplete_gamma,
    func_F,
    func_G,
    func_Q,
    beta_integral,
    lens_area,
)
from .lemmas import ternary_campbell, ternary_pgfl_approx, ternary_pgfl_nested
from .moments import mean_signal_power, mean_interference_power, SignalMoments
from .coverage import coverage_probability, CoverageEngine
from .rate import ase
from .efficiency import aee, ece

__all__ = [
    "upper_incomplete_gamma",
    "func_F",
    "func_G",
    "func_Q",
    "beta_integral",
    "lens_area",
    "ternary_campbell",
    "ternary_pgfl_approx",
    "ternary_pgfl_nested",
    "mean_signal_power",
    "mean_interference_power",
    "SignalMoments",
    "coverage_probability",
    "CoverageEngine",
    "ase",
    "aee",
    "ece",
]
