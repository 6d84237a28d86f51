"""Pure-Python/NumPy implementation of the hot kernels.

Mirrors ``_core.pyx`` function by function.  Used when the compiled
extension is unavailable or ``WEDGESE_PURE=1`` is set.
"""

import math

import numpy as np

from ._series import (
    BESSEL_SERIES_X,
    BESSEL_TINY,
    G_PARALLEL_TAYLOR,
    G_PERP_TAYLOR,
    POL_PHI,
    POL_RHO,
    RESCALE_BIG,
    RESCALE_SMALL,
    SERIES_SWITCH,
    TWO_THIRDS,
    miller_start,
)

NAME = "python"

_GPAR_REV = G_PARALLEL_TAYLOR[::-1]
_GPERP_REV = G_PERP_TAYLOR[::-1]


def _horner(coeffs_rev, t):
    r = coeffs_rev[0]
    for c in coeffs_rev[1:]:
        r = r * t + c
    return r


def g_parallel(x):
    x = abs(x)
    if x < SERIES_SWITCH:
        return _horner(_GPAR_REV, x * x)
    s = math.sin(x)
    c = math.cos(x)
    return s / x + c / (x * x) - s / (x * x * x)


def g_perp(x):
    x = abs(x)
    if x < SERIES_SWITCH:
        return _horner(_GPERP_REV, x * x)
    s = math.sin(x)
    c = math.cos(x)
    return c / (x * x) - s / (x * x * x)


def g_parallel_array(x):
    x = np.abs(np.asarray(x, dtype=float))
    small = x < SERIES_SWITCH
    out = np.empty_like(x)
    t = x[small] ** 2
    out[small] = _horner(_GPAR_REV, t)
    xb = x[~small]
    s, c = np.sin(xb), np.cos(xb)
    out[~small] = s / xb + c / (xb * xb) - s / (xb * xb * xb)
    return out


def g_perp_array(x):
    x = np.abs(np.asarray(x, dtype=float))
    small = x < SERIES_SWITCH
    out = np.empty_like(x)
    t = x[small] ** 2
    out[small] = _horner(_GPERP_REV, t)
    xb = x[~small]
    s, c = np.sin(xb), np.cos(xb)
    out[~small] = c / (xb * xb) - s / (xb * xb * xb)
    return out


def h_phi(x, psi):
    s = math.sin(psi)
    c = math.cos(psi)
    arg = x * s
    return g_parallel(arg) * s * s + 2.0 * g_perp(arg) * c * c


def h_rho(x, psi):
    s = math.sin(psi)
    c = math.cos(psi)
    arg = x * s
    return g_parallel(arg) * c * c + 2.0 * g_perp(arg) * s * s


def braces(q, x, phi, pol):
    alpha = math.pi / q
    if alpha - phi < phi:
        phi = alpha - phi
    if phi < 0.0:
        phi = 0.0
    big_x = 2.0 * x
    if pol == POL_RHO:
        total = TWO_THIRDS - h_rho(big_x, phi)
    elif pol == POL_PHI:
        total = TWO_THIRDS - h_phi(big_x, phi)
    else:
        total = TWO_THIRDS - g_parallel(big_x * math.sin(phi))
    for l in range(1, q):
        a = math.pi * l / q
        psi = phi + a
        if pol == POL_RHO:
            total -= h_rho(big_x, psi) - h_rho(big_x, a)
        elif pol == POL_PHI:
            total -= h_phi(big_x, psi) + h_phi(big_x, a)
        else:
            total -= g_parallel(big_x * math.sin(psi)) - g_parallel(big_x * math.sin(a))
    return total


def _h_arrays(big_x, psi, pol):
    s = np.sin(psi)
    c = np.cos(psi)
    arg = big_x * s
    if pol == POL_RHO:
        return g_parallel_array(arg) * c * c + 2.0 * g_perp_array(arg) * s * s
    if pol == POL_PHI:
        return g_parallel_array(arg) * s * s + 2.0 * g_perp_array(arg) * c * c
    return g_parallel_array(arg)


def braces_array(q, x, phi, pol):
    x = np.ascontiguousarray(x, dtype=float)
    phi = np.array(phi, dtype=float)
    alpha = math.pi / q
    phi = np.where(alpha - phi < phi, alpha - phi, phi)
    phi = np.maximum(phi, 0.0)
    big_x = 2.0 * x
    total = TWO_THIRDS - _h_arrays(big_x, phi, pol)
    for l in range(1, q):
        a = math.pi * l / q
        near = _h_arrays(big_x, phi + a, pol)
        far = _h_arrays(big_x, np.full_like(phi, a), pol)
        if pol == POL_PHI:
            total -= near + far
        else:
            total -= near - far
    return total


def _bessel_series(n, x):
    h = 0.5 * x
    lead = 1.0
    for k in range(1, n + 1):
        lead *= h / k
        if lead < BESSEL_TINY:
            return 0.0
    term = lead
    total = lead
    hh = h * h
    k = 1
    while True:
        term *= -hh / (k * (n + k))
        total += term
        if abs(term) <= 1e-17 * abs(total):
            break
        k += 1
    if abs(total) < BESSEL_TINY:
        return 0.0
    return total


def _bessel_miller(n, x):
    start = miller_start(n, x)
    tox = 2.0 / x
    bjp = 0.0
    bj = 1.0
    even_sum = 0.0
    ans = 0.0
    for j in range(start, 0, -1):
        bjm = j * tox * bj - bjp
        bjp = bj
        bj = bjm
        if abs(bj) > RESCALE_BIG:
            bj *= RESCALE_SMALL
            bjp *= RESCALE_SMALL
            ans *= RESCALE_SMALL
            even_sum *= RESCALE_SMALL
        if j == n + 1:
            ans = bj
        if (j - 1) % 2 == 0 and j > 1:
            even_sum += bj
    norm = bj + 2.0 * even_sum
    if n == 0:
        return bj / norm
    return ans / norm


def bessel_j(n, x):
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    if x < BESSEL_SERIES_X or x * x < 4.0 * (n + 1):
        return _bessel_series(n, x)
    v = _bessel_miller(n, x)
    return 0.0 if abs(v) < BESSEL_TINY else v


def bessel_table(nmax, u):
    """J_0..J_nmax at each entry of ``u``; shape (len(u), nmax + 1)."""
    u = np.ascontiguousarray(u, dtype=float)
    out = np.zeros((u.size, nmax + 1))
    zero = u == 0.0
    out[zero, 0] = 1.0
    live = ~zero
    if not live.any():
        return out
    ul = u[live]
    start = miller_start(nmax, float(ul.max()))
    tab = np.zeros((start + 1, ul.size))
    tox = 2.0 / ul
    bjp = np.zeros(ul.size)
    bj = np.ones(ul.size)
    tab[start] = bj
    even_sum = np.zeros(ul.size)
    for j in range(start, 0, -1):
        bjm = j * tox * bj - bjp
        bjp = bj
        bj = bjm
        big = np.abs(bj) > RESCALE_BIG
        if big.any():
            bj = np.where(big, bj * RESCALE_SMALL, bj)
            bjp = np.where(big, bjp * RESCALE_SMALL, bjp)
            even_sum = np.where(big, even_sum * RESCALE_SMALL, even_sum)
            tab[j:, big] *= RESCALE_SMALL
        tab[j - 1] = bj
        if (j - 1) % 2 == 0 and j > 1:
            even_sum = even_sum + bj
    norm = tab[0] + 2.0 * even_sum
    out[live] = (tab[: nmax + 1] / norm).T
    return out
