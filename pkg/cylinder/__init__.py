# cylinder/__init__.py
"""
Exact star-algebra engine for the massless scalar on 2D Minkowski space
and the Einstein cylinder.

Layers, bottom-up:
    scalars      exact complex rationals and truncated ħ-series
    modes        normal-ordered polynomials in chiral modes a_n
    kernels      propagators, two-point functions and image sums
    functionals  spectral evaluation on band-limited configurations
    conformal    circle diffeomorphisms, Schwarzian, weighted maps
    suites       named verification suites producing JSON reports
"""

from enum import Enum
import logging

logger = logging.getLogger(__name__)

__version__ = "0.3.0"


class CylinderError(ValueError):
    """Base class for engine errors."""


class TruncationError(CylinderError):
    """ħ-series orders mismatch or a product overflows the truncation."""


class AlgebraError(CylinderError):
    """Invalid input to a mode-algebra or functional operation."""


class ChartError(CylinderError):
    """Point outside a chart, or a map that is not invertible there."""


class ConfigError(CylinderError):
    """Invalid run configuration value."""

    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


class CheckKind(Enum):
    """How a suite check compares expected and actual values."""
    EXACT = "exact"
    NUMERIC = "numeric"


__all__ = [
    "CylinderError",
    "TruncationError",
    "AlgebraError",
    "ChartError",
    "ConfigError",
    "CheckKind",
    "__version__",
]
