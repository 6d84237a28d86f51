"""Spontaneous emission of a dipole inside a perfectly conducting wedge."""

from ._backend import BACKEND
from .errors import (
    NonConvergenceError,
    NonIntegerWedgeError,
    TruncationError,
    WedgeDomainError,
)
from .mode_oracle import QuadratureConfig, mode_sum_braces
from .wedge_rates import (
    AtomPosition,
    RateResult,
    Transition,
    WedgeGeometry,
    braces_phi,
    braces_rho,
    braces_z,
    emitted_power,
    free_space_rate,
    normalized_rates,
)

__version__ = "0.1.0"
