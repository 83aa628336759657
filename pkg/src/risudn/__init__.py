"""risudn: dual-engine ternary stochastic geometry for RIS-assisted UDNs."""
from .config import (
    PointProcessConfig,
    FadingSpec,
    PowerModel,
    QuadratureConfig,
    CoverageParams,
    ExperimentConfig,
)

__version__ = "0.1.0"

__all__ = [
    "PointProcessConfig",
    "FadingSpec",
    "PowerModel",
    "QuadratureConfig",
    "CoverageParams",
    "ExperimentConfig",
    "__version__",
]
