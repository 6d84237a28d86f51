"""Constants shared by the compiled and pure-Python kernels."""

from fractions import Fraction
from math import factorial

# Below this argument the G kernels switch to their Maclaurin series; above
# it the three-term closed forms lose at most a few ulps to cancellation.
SERIES_SWITCH = 0.5

# Coefficients of t**k, t = x**2.  Eight terms leave a truncation error
# below 5e-17 at the switch point.
G_PARALLEL_TAYLOR = tuple(
    float(Fraction((-1) ** k * (2 * k + 2) ** 2, factorial(2 * k + 3)))
    for k in range(8)
)
G_PERP_TAYLOR = tuple(
    float(Fraction((-1) ** (k + 1) * (2 * k + 2), factorial(2 * k + 3)))
    for k in range(8)
)

TWO_THIRDS = 2.0 / 3.0

# Bessel evaluation: ascending series below BESSEL_SERIES_X (or x**2 < 4(n+1)),
# Miller backward recurrence otherwise.
BESSEL_SERIES_X = 4.0
BESSEL_TINY = 1e-300
RESCALE_BIG = 1e200
RESCALE_SMALL = 1e-200

POL_RHO, POL_PHI, POL_Z = 0, 1, 2


def miller_start(order: int, x: float) -> int:
    """Even starting order for the backward recurrence."""
    top = max(order, int(x) + 1)
    start = top + 16 + int((160.0 * top) ** 0.5)
    return start + (start & 1)
