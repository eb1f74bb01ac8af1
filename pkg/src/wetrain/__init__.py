"""Optimized two-phase channel training for multi-antenna wireless energy
transfer over frequency-selective channels."""

__version__ = "0.1.0"

from .params import Scheme, SystemParams, TrainingDesign  # noqa: E402
from .orderstats import g, g_exact_series, g_quadrature  # noqa: E402
from .designer import optimize_design, optimize_e1  # noqa: E402
from .protocol import monte_carlo  # noqa: E402

__all__ = [
    "Scheme", "SystemParams", "TrainingDesign", "g", "g_exact_series", "g_quadrature",
    "optimize_design", "optimize_e1", "monte_carlo",
]
