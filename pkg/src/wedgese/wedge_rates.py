"""Closed-form spontaneous-emission rates inside a perfectly conducting wedge.

Positions are dimensionless: ``x = |k_ab| rho`` and ``phi`` is the angle
measured from one plate, ``0 <= phi <= pi/q``.  For each polarization the
"braces" factor equals 2/3 in free space, so the normalized rate
``Gamma / Gamma_free = 1.5 * braces``.
"""

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._backend import core
from ._series import POL_PHI, POL_RHO, POL_Z
from .errors import NonIntegerWedgeError, WedgeDomainError

POLARIZATIONS = ("rho", "phi", "z")
_POL_CODE = {"rho": POL_RHO, "phi": POL_PHI, "z": POL_Z}

# Angles within this relative distance outside [0, pi/q] are clamped.
_ANGLE_SLACK = 1e-12


@dataclass(frozen=True)
class WedgeGeometry:
    """Wedge of opening angle ``pi/q`` (q = 1 is a single plate)."""

    q: int

    def __post_init__(self):
        q = self.q
        if isinstance(q, bool):
            raise NonIntegerWedgeError(f"q must be an integer, got {q!r}")
        if isinstance(q, float) or not isinstance(q, (int, np.integer)):
            try:
                ok = float(q).is_integer()
            except (TypeError, ValueError):
                ok = False
            if not ok:
                raise NonIntegerWedgeError(
                    f"q = pi/alpha must be an integer, got {q!r}"
                )
        q = int(q)
        if q < 1:
            raise WedgeDomainError(f"q must be >= 1, got {q}")
        object.__setattr__(self, "q", q)

    @property
    def alpha(self) -> float:
        return math.pi / self.q


@dataclass(frozen=True)
class AtomPosition:
    x: float
    phi: float

    def __post_init__(self):
        x, phi = float(self.x), float(self.phi)
        if not math.isfinite(x) or x < 0.0:
            raise WedgeDomainError(f"x must be finite and >= 0, got {self.x!r}")
        if not math.isfinite(phi):
            raise WedgeDomainError(f"phi must be finite, got {self.phi!r}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "phi", phi)

    @classmethod
    def from_declination(cls, x, declination, geom):
        """Build from the angle measured from the bisector plane."""
        return cls(x, declination + 0.5 * geom.alpha)

    def declination(self, geom) -> float:
        return self.phi - 0.5 * geom.alpha


@dataclass(frozen=True)
class Transition:
    """One decay channel a -> b with its free-space rates per polarization."""

    k_ab: float
    gamma_free_rho: float = 0.0
    gamma_free_phi: float = 0.0
    gamma_free_z: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.k_ab) and self.k_ab > 0.0):
            raise WedgeDomainError(f"k_ab must be positive, got {self.k_ab!r}")
        for name in ("gamma_free_rho", "gamma_free_phi", "gamma_free_z"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise WedgeDomainError(f"{name} must be >= 0, got {v!r}")


@dataclass(frozen=True)
class RateResult:
    braces_rho: float
    braces_phi: float
    braces_z: float
    norm_rho: float
    norm_phi: float
    norm_z: float
    norm_total: float


def _checked_phi(geom, phi):
    alpha = geom.alpha
    slack = _ANGLE_SLACK * alpha
    if phi < -slack or phi > alpha + slack:
        raise WedgeDomainError(
            f"phi = {phi!r} outside [0, pi/q] = [0, {alpha!r}] for q = {geom.q}"
        )
    return min(max(phi, 0.0), alpha)


def braces(geom: WedgeGeometry, pos: AtomPosition, pol: str) -> float:
    """Curly-brace factor for polarization ``pol`` in {'rho', 'phi', 'z'}."""
    try:
        code = _POL_CODE[pol]
    except KeyError:
        raise WedgeDomainError(f"unknown polarization {pol!r}") from None
    return core.braces(geom.q, pos.x, _checked_phi(geom, pos.phi), code)


def braces_z(geom: WedgeGeometry, pos: AtomPosition) -> float:
    """2/3 - G(2x sin phi) - sum_l [G(2x sin(phi + pi l/q)) - G(2x sin(pi l/q))]."""
    return braces(geom, pos, "z")


def braces_phi(geom: WedgeGeometry, pos: AtomPosition) -> float:
    """2/3 - H_phi(2x, phi) - sum_l [H_phi(2x, phi + pi l/q) + H_phi(2x, pi l/q)]."""
    return braces(geom, pos, "phi")


def braces_rho(geom: WedgeGeometry, pos: AtomPosition) -> float:
    """2/3 - H_rho(2x, phi) - sum_l [H_rho(2x, phi + pi l/q) - H_rho(2x, pi l/q)]."""
    return braces(geom, pos, "rho")


def braces_grid(geom: WedgeGeometry, x, phi, pol: str) -> np.ndarray:
    """Vectorized braces over matching 1-D arrays of x and phi."""
    x = np.ascontiguousarray(x, dtype=float).ravel()
    phi = np.ascontiguousarray(phi, dtype=float).ravel()
    if x.shape != phi.shape:
        raise WedgeDomainError("x and phi must have the same length")
    if not (np.all(np.isfinite(x)) and np.all(x >= 0.0)):
        raise WedgeDomainError("x must be finite and >= 0")
    alpha = geom.alpha
    slack = _ANGLE_SLACK * alpha
    if not np.all(np.isfinite(phi)) or np.any(phi < -slack) or np.any(phi > alpha + slack):
        raise WedgeDomainError(f"phi outside [0, pi/q] for q = {geom.q}")
    phi = np.clip(phi, 0.0, alpha)
    try:
        code = _POL_CODE[pol]
    except KeyError:
        raise WedgeDomainError(f"unknown polarization {pol!r}") from None
    return core.braces_array(geom.q, x, phi, code)


def check_weights(dipole_weights: Sequence[float]):
    w = tuple(float(v) for v in dipole_weights)
    if len(w) != 3:
        raise WedgeDomainError("dipole weights must be a (rho, phi, z) triple")
    if any(not math.isfinite(v) or v < 0.0 for v in w):
        raise WedgeDomainError(f"dipole weights must be >= 0, got {w}")
    if abs(math.fsum(w) - 1.0) > 1e-12:
        raise WedgeDomainError(f"dipole weights must sum to 1, got {w}")
    return w


def normalized_rates(
    geom: WedgeGeometry,
    pos: AtomPosition,
    dipole_weights: Sequence[float] = (1 / 3, 1 / 3, 1 / 3),
) -> RateResult:
    """Per-polarization rates relative to free space, plus their weighted sum."""
    w = check_weights(dipole_weights)
    b = [braces(geom, pos, p) for p in POLARIZATIONS]
    n = [1.5 * v for v in b]
    total = w[0] * n[0] + w[1] * n[1] + w[2] * n[2]
    return RateResult(b[0], b[1], b[2], n[0], n[1], n[2], total)


def free_space_rate(dipole_sq: float, k_ab: float, hbar: float) -> float:
    """Free-space rate (4 / hbar) |<a|d_j|b>|^2 |k_ab|^3 for one polarization."""
    if not (math.isfinite(k_ab) and k_ab > 0.0):
        raise WedgeDomainError(f"k_ab must be positive, got {k_ab!r}")
    if not (math.isfinite(hbar) and hbar > 0.0):
        raise WedgeDomainError(f"hbar must be positive, got {hbar!r}")
    if not (math.isfinite(dipole_sq) and dipole_sq >= 0.0):
        raise WedgeDomainError(f"dipole_sq must be >= 0, got {dipole_sq!r}")
    return 4.0 / hbar * dipole_sq * k_ab**3


def emitted_power(
    atom: Sequence[Transition],
    geom: WedgeGeometry,
    rho: float,
    phi: float,
    hbar: float,
    c: float,
) -> float:
    """Total spontaneous power change of level a (always <= 0).

    ``rho`` is the physical distance to the cusp, in the inverse unit of
    the transition wavenumbers.  Each transition is evaluated at its own
    ``x = k_ab * rho``.  Braces values that round to slightly below zero
    are clipped so the result never turns positive.
    """
    atom = list(atom)
    if not atom:
        raise WedgeDomainError("an atom needs at least one transition")
    if not (math.isfinite(rho) and rho >= 0.0):
        raise WedgeDomainError(f"rho must be finite and >= 0, got {rho!r}")
    total = 0.0
    for tr in atom:
        pos = AtomPosition(tr.k_ab * rho, phi)
        b_rho, b_phi, b_z = (max(braces(geom, pos, p), 0.0) for p in POLARIZATIONS)
        weighted = (
            tr.gamma_free_rho * b_rho + tr.gamma_free_phi * b_phi + tr.gamma_free_z * b_z
        )
        total -= 0.5 * hbar * c * tr.k_ab * weighted
    return total
