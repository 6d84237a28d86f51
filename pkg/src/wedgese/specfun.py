"""Elementary kernels and integer-order Bessel functions.

The G kernels come from the spherical Bessel functions of order 1/2 and 3/2:

    G_par(x)  = sin x / x + cos x / x**2 - sin x / x**3
    G_perp(x) = cos x / x**2 - sin x / x**3

Both are evaluated through their Maclaurin series below x = 0.5, where the
closed forms cancel catastrophically, and are defined at 0 by their limits
2/3 and -1/3.
"""

import math

import numpy as np

from ._backend import core
from .errors import WedgeDomainError

__all__ = [
    "g_parallel",
    "g_perp",
    "h_phi",
    "h_rho",
    "bessel_j",
    "bessel_j_prime",
    "bessel_table",
]


def _check_arg(x, name="x"):
    x = float(x)
    if not math.isfinite(x):
        raise WedgeDomainError(f"{name} must be finite, got {x!r}")
    if x < 0.0:
        raise WedgeDomainError(f"{name} must be >= 0, got {x!r}")
    return x


def g_parallel(x: float) -> float:
    """Kernel G_par(x); tends to 2/3 - 2x**2/15 near the origin."""
    return core.g_parallel(_check_arg(x))


def g_perp(x: float) -> float:
    """Kernel G_perp(x); tends to -1/3 + x**2/30 near the origin."""
    return core.g_perp(_check_arg(x))


def _check_angle(psi):
    psi = float(psi)
    if not math.isfinite(psi):
        raise WedgeDomainError(f"psi must be finite, got {psi!r}")
    return psi


def h_phi(x: float, psi: float) -> float:
    """G_par(x sin psi) sin^2 psi + 2 G_perp(x sin psi) cos^2 psi."""
    return core.h_phi(_check_arg(x), _check_angle(psi))


def h_rho(x: float, psi: float) -> float:
    """G_par(x sin psi) cos^2 psi + 2 G_perp(x sin psi) sin^2 psi."""
    return core.h_rho(_check_arg(x), _check_angle(psi))


def _check_order(n):
    if isinstance(n, bool) or int(n) != n:
        raise WedgeDomainError(f"Bessel order must be an integer, got {n!r}")
    n = int(n)
    if n < 0:
        raise WedgeDomainError(f"Bessel order must be >= 0, got {n}")
    return n


def bessel_j(n: int, x: float) -> float:
    """Bessel function of the first kind J_n(x) for integer n >= 0, x >= 0.

    Uses the ascending series where its terms shrink from the start
    (x < 4 or x**2 < 4(n + 1)) and Miller's backward
    recurrence (normalized by J_0 + 2 sum J_2k = 1) otherwise.  Values that
    fall below 1e-300 are returned as exactly 0.
    """
    return core.bessel_j(_check_order(n), _check_arg(x))


def bessel_j_prime(n: int, x: float) -> float:
    """Derivative J_n'(x) = (J_{n-1}(x) - J_{n+1}(x)) / 2, with J_0' = -J_1."""
    n = _check_order(n)
    x = _check_arg(x)
    if n == 0:
        return -core.bessel_j(1, x)
    return 0.5 * (core.bessel_j(n - 1, x) - core.bessel_j(n + 1, x))


def bessel_table(nmax: int, u) -> np.ndarray:
    """Array of J_0..J_nmax evaluated at every entry of ``u``.

    Returns shape ``(len(u), nmax + 1)``.  One backward recurrence per
    argument produces the whole order sequence.
    """
    nmax = _check_order(nmax)
    u = np.ascontiguousarray(u, dtype=float).ravel()
    if not np.all(np.isfinite(u)) or np.any(u < 0.0):
        raise WedgeDomainError("Bessel arguments must be finite and >= 0")
    return core.bessel_table(nmax, u)
