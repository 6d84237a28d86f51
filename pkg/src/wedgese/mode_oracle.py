"""Brute-force wedge mode sums, independent of the closed-form kernels.

The braces factors are rebuilt from the TM/TE modes of the wedge with the
cap pushed to infinity.  Writing the in-plane wavenumber as
``y = k sin(theta)`` and ``k_z = k cos(theta)`` removes the energy delta
function, leaving

    braces_j = 2q * int_0^{pi/2} sin^3(theta)
               * sum_{m >= 0} mult_m sum_lambda Q_{qm}^{j,lambda}(x sin theta) dtheta

with ``mult_0 = 1`` and ``mult_m = 2`` for ``m >= 1`` (the +-m pair).  The
theta integral is done by Gauss-Legendre quadrature and checked by node
doubling.  Also hosts numerical checks of the Bessel summation identities
that turn the m-sum into a finite sum over images.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import specfun
from .errors import NonConvergenceError, TruncationError, WedgeDomainError
from .wedge_rates import POLARIZATIONS, AtomPosition, WedgeGeometry, _checked_phi

TM, TE = 0, 1


@dataclass(frozen=True)
class QuadratureConfig:
    nodes: int = 400
    m_margin: int = 40
    tolerance: float = 1e-8

    def __post_init__(self):
        if int(self.nodes) != self.nodes or self.nodes < 16:
            raise WedgeDomainError(f"nodes must be an integer >= 16, got {self.nodes!r}")
        if int(self.m_margin) != self.m_margin or self.m_margin < 10:
            raise WedgeDomainError(f"m_margin must be an integer >= 10, got {self.m_margin!r}")
        if not (math.isfinite(self.tolerance) and self.tolerance > 0.0):
            raise WedgeDomainError(f"tolerance must be > 0, got {self.tolerance!r}")


@lru_cache(maxsize=16)
def _half_range_rule(nodes):
    t, w = np.polynomial.legendre.leggauss(nodes)
    theta = 0.25 * np.pi * (t + 1.0)
    theta.setflags(write=False)
    w = 0.25 * np.pi * w
    w.setflags(write=False)
    return theta, w


def truncation_order(q: int, x: float, m_margin: int = 40) -> int:
    """Smallest M with q*M > 2x + m_margin."""
    return int(math.floor((2.0 * x + m_margin) / q)) + 1


def mode_weights(geom: WedgeGeometry, pos: AtomPosition, pol: str, theta, m_max: int):
    """Squared mode amplitudes Q_{qm}^{pol,lambda} at each quadrature angle.

    Returns an array of shape ``(len(theta), m_max + 1, 2)`` indexed by
    node, m and lambda (0 = TM, 1 = TE), already multiplied by the +-m
    multiplicity.  Every entry is non-negative.
    """
    if pol not in POLARIZATIONS:
        raise WedgeDomainError(f"unknown polarization {pol!r}")
    q = geom.q
    phi = _checked_phi(geom, pos.phi)
    theta = np.asarray(theta, dtype=float)
    s = np.sin(theta)[:, None]
    c = np.cos(theta)[:, None]
    orders = q * np.arange(m_max + 1)
    table = specfun.bessel_table(int(orders[-1]) + 1, pos.x * s[:, 0])

    jn = table[:, orders]
    up = table[:, orders + 1]
    down = np.empty_like(jn)
    down[:, 0] = -table[:, 1]  # J_{-1} = -J_1
    down[:, 1:] = table[:, orders[1:] - 1]
    jprime = 0.5 * (down - up)
    # n J_n(u) / u without dividing by u
    j_over_u = 0.5 * (down + up)
    j_over_u[:, 0] = 0.0

    sin2 = np.sin(orders * phi) ** 2
    cos2 = np.cos(orders * phi) ** 2
    cot2 = (c / s) ** 2
    csc2 = 1.0 / s**2

    out = np.zeros((theta.size, m_max + 1, 2))
    if pol == "rho":
        out[:, :, TM] = cot2 * jprime**2 * sin2
        out[:, :, TE] = csc2 * j_over_u**2 * sin2
    elif pol == "phi":
        out[:, :, TM] = cot2 * j_over_u**2 * cos2
        out[:, :, TE] = csc2 * jprime**2 * cos2
    else:
        out[:, :, TM] = jn**2 * sin2
    # TM modes start at m = 1
    out[:, 0, TM] = 0.0
    mult = np.full(m_max + 1, 2.0)
    mult[0] = 1.0
    return out * mult[None, :, None]


def _mode_sum(geom, pos, pol, nodes, m_max):
    theta, w = _half_range_rule(nodes)
    per_node = mode_weights(geom, pos, pol, theta, m_max).sum(axis=(1, 2))
    return 2.0 * geom.q * float(np.sum(w * np.sin(theta) ** 3 * per_node))


def mode_sum_braces(
    geom: WedgeGeometry,
    pos: AtomPosition,
    pol: str,
    cfg: QuadratureConfig = QuadratureConfig(),
    m_max: int = None,
) -> float:
    """Braces factor for ``pol`` from the explicit mode sum.

    Raises NonConvergenceError when the estimates at ``cfg.nodes`` and
    ``2 * cfg.nodes`` differ by ``cfg.tolerance`` or more.
    """
    if m_max is None:
        m_max = truncation_order(geom.q, pos.x, cfg.m_margin)
    coarse = _mode_sum(geom, pos, pol, cfg.nodes, m_max)
    fine = _mode_sum(geom, pos, pol, 2 * cfg.nodes, m_max)
    if not abs(coarse - fine) < cfg.tolerance:
        raise NonConvergenceError(coarse, fine, cfg.tolerance)
    return fine


# -- summation identities -------------------------------------------------


def _ratio_j1(z):
    """J_1(z)/z, equal to 1/2 at z = 0."""
    if z == 0.0:
        return 0.5
    return specfun.bessel_j(1, z) / z


def _image_sums(q, arg, phi):
    """Per-image pieces: (J0(2a sin psi), J1(..)/(..), sin^2, cos^2) for psi_l and pi l/q."""
    rows = []
    for l in range(q):
        a = math.pi * l / q
        row = []
        for psi in (phi + a, a):
            z = abs(2.0 * arg * math.sin(psi))
            row.append(
                (specfun.bessel_j(0, z), _ratio_j1(z), math.sin(psi) ** 2, math.cos(psi) ** 2)
            )
        rows.append(row)
    return rows


def _identity_rhs(q, arg, phi, trig, family):
    total = 0.0
    for (j0p, r1p, s2p, c2p), (j0a, r1a, s2a, c2a) in _image_sums(q, arg, phi):
        if family == "J2":
            total += j0a - j0p if trig == "sin2" else j0a + j0p
        elif family == "m2J2":
            if trig == "sin2":
                total += -j0p * c2p + j0a * c2a + r1p - r1a
            else:
                total += j0p * c2p + j0a * c2a - r1p - r1a
        else:
            if trig == "sin2":
                total += j0p * s2p - j0a * s2a - r1p + r1a
            else:
                total += -j0p * s2p - j0a * s2a + r1p + r1a
    return total / (2.0 * q)


def _identity_term(q, m, arg, phi, trig, family):
    n = q * m
    angle = math.sin(n * phi) ** 2 if trig == "sin2" else math.cos(n * phi) ** 2
    if family == "J2":
        f = specfun.bessel_j(n, arg) ** 2
    elif family == "m2J2":
        # (q m / arg)^2 J_{qm}^2, the combination that has a finite image sum
        f = (n / arg * specfun.bessel_j(n, arg)) ** 2 if n else 0.0
    else:
        f = specfun.bessel_j_prime(n, arg) ** 2
    return f * angle


def check_addition_theorem(
    q: int, arg: float, phi: float, trig: str, family: str, M: int = None
) -> float:
    """Residual |sum_{|m|<=M} f_m(arg) trig(q m phi) - finite image sum|.

    ``trig`` is 'sin2' or 'cos2'; ``family`` is 'J2' (J_{qm}^2),
    'm2J2' ((qm/arg)^2 J_{qm}^2) or 'Jp2' (J_{qm}'^2).
    """
    if trig not in ("sin2", "cos2"):
        raise WedgeDomainError(f"trig must be 'sin2' or 'cos2', got {trig!r}")
    if family not in ("J2", "m2J2", "Jp2"):
        raise WedgeDomainError(f"unknown family {family!r}")
    q = WedgeGeometry(q).q
    arg = float(arg)
    if not (math.isfinite(arg) and arg > 0.0):
        raise WedgeDomainError(f"arg must be > 0, got {arg!r}")
    if M is None:
        M = truncation_order(q, arg, 40)
    lhs = _identity_term(q, 0, arg, phi, trig, family)
    last = lhs
    for m in range(1, M + 1):
        last = 2.0 * _identity_term(q, m, arg, phi, trig, family)
        lhs += last
    if abs(last) > 1e-15 * abs(lhs):
        raise TruncationError(
            f"m-sum not converged at M={M}: last term {last:.3e}, sum {lhs:.3e}"
        )
    return abs(lhs - _identity_rhs(q, arg, phi, trig, family))


def check_derivative_identity(n: int, x: float) -> float:
    """Residual of J_n'^2 = (n/x) J_n' J_n - d/dx[J_n J_{n+1}] + J_n^2 - ((n+1)/x) J_n J_{n+1}.

    The derivative term uses a central difference with h = 1e-5 max(1, x).
    """
    x = float(x)
    if not (math.isfinite(x) and x > 0.0):
        raise WedgeDomainError(f"x must be > 0, got {x!r}")
    jn = specfun.bessel_j(n, x)
    jn1 = specfun.bessel_j(n + 1, x)
    jp = specfun.bessel_j_prime(n, x)
    h = 1e-5 * max(1.0, x)

    def prod(t):
        return specfun.bessel_j(n, t) * specfun.bessel_j(n + 1, t)

    if x - h > 0.0:
        dprod = (prod(x + h) - prod(x - h)) / (2.0 * h)
    else:
        dprod = (prod(x + h) - prod(x)) / h
    rhs = n / x * jp * jn - dprod + jn * jn - (n + 1) / x * jn * jn1
    return abs(jp * jp - rhs)


def check_angular_reduction(mu: int, nu: int, a: float, nodes: int = None) -> float:
    """Residual of int_0^{pi/2} J_mu(a sin t) sin^{mu+1} t cos^{2nu+1} t dt
    = 2^nu nu! a^{-nu-1} J_{nu+mu+1}(a), left side by Gauss-Legendre."""
    if mu != 0:
        raise WedgeDomainError("only mu = 0 is supported")
    if nu not in (0, 1):
        raise WedgeDomainError("nu must be 0 or 1")
    a = float(a)
    if not (math.isfinite(a) and a > 0.0):
        raise WedgeDomainError(f"a must be > 0, got {a!r}")
    if nodes is None:
        nodes = 64 + 2 * int(a)
    theta, w = _half_range_rule(nodes)
    s, c = np.sin(theta), np.cos(theta)
    j0 = specfun.bessel_table(0, a * s)[:, 0]
    lhs = float(np.sum(w * j0 * s ** (mu + 1) * c ** (2 * nu + 1)))
    rhs = 2.0**nu * math.factorial(nu) * a ** (-nu - 1) * specfun.bessel_j(nu + mu + 1, a)
    return abs(lhs - rhs)
