# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: G/H functions, closed-form braces sums, Bessel recurrences.

Arguments are assumed validated by the Python layer.  Loops over arrays
release the GIL so callers may fan out across threads.
"""

from libc.math cimport cos, fabs, sin, M_PI
from libc.stdlib cimport free, malloc

import numpy as np

from ._series import (
    BESSEL_SERIES_X as _SERIES_X,
    G_PARALLEL_TAYLOR,
    G_PERP_TAYLOR,
    SERIES_SWITCH as _SWITCH,
    miller_start,
)

NAME = "cython"

cdef double SWITCH = _SWITCH
cdef double SERIES_X = _SERIES_X
cdef double TWO_THIRDS = 2.0 / 3.0
cdef double TINY = 1e-300
cdef double BIG = 1e200
cdef double SMALL = 1e-200
cdef int NTAYLOR = 8
cdef double GPAR[8]
cdef double GPERP[8]

cdef int _k
for _k in range(NTAYLOR):
    GPAR[_k] = G_PARALLEL_TAYLOR[_k]
    GPERP[_k] = G_PERP_TAYLOR[_k]

cdef enum:
    POL_RHO = 0
    POL_PHI = 1
    POL_Z = 2


cdef inline double _gpar(double x) noexcept nogil:
    cdef double t, r, s, c
    cdef int k
    x = fabs(x)
    if x < SWITCH:
        t = x * x
        r = GPAR[NTAYLOR - 1]
        for k in range(NTAYLOR - 2, -1, -1):
            r = r * t + GPAR[k]
        return r
    s = sin(x)
    c = cos(x)
    return s / x + c / (x * x) - s / (x * x * x)


cdef inline double _gperp(double x) noexcept nogil:
    cdef double t, r, s, c
    cdef int k
    x = fabs(x)
    if x < SWITCH:
        t = x * x
        r = GPERP[NTAYLOR - 1]
        for k in range(NTAYLOR - 2, -1, -1):
            r = r * t + GPERP[k]
        return r
    s = sin(x)
    c = cos(x)
    return c / (x * x) - s / (x * x * x)


cdef inline double _hphi(double x, double psi) noexcept nogil:
    cdef double s = sin(psi)
    cdef double c = cos(psi)
    cdef double arg = x * s
    return _gpar(arg) * s * s + 2.0 * _gperp(arg) * c * c


cdef inline double _hrho(double x, double psi) noexcept nogil:
    cdef double s = sin(psi)
    cdef double c = cos(psi)
    cdef double arg = x * s
    return _gpar(arg) * c * c + 2.0 * _gperp(arg) * s * s


cdef double _braces(int q, double x, double phi, int pol) noexcept nogil:
    cdef double alpha = M_PI / q
    cdef double big_x = 2.0 * x
    cdef double total, a, psi
    cdef int l
    if alpha - phi < phi:
        phi = alpha - phi
    if phi < 0.0:
        phi = 0.0
    if pol == POL_RHO:
        total = TWO_THIRDS - _hrho(big_x, phi)
    elif pol == POL_PHI:
        total = TWO_THIRDS - _hphi(big_x, phi)
    else:
        total = TWO_THIRDS - _gpar(big_x * sin(phi))
    for l in range(1, q):
        a = M_PI * l / q
        psi = phi + a
        if pol == POL_RHO:
            total -= _hrho(big_x, psi) - _hrho(big_x, a)
        elif pol == POL_PHI:
            total -= _hphi(big_x, psi) + _hphi(big_x, a)
        else:
            total -= _gpar(big_x * sin(psi)) - _gpar(big_x * sin(a))
    return total


cdef double _bessel_series(int n, double x) noexcept nogil:
    cdef double h = 0.5 * x
    cdef double lead = 1.0
    cdef double term, total, hh
    cdef int k
    for k in range(1, n + 1):
        lead *= h / k
        if lead < TINY:
            return 0.0
    term = lead
    total = lead
    hh = h * h
    k = 1
    while True:
        term *= -hh / (<double>k * (n + k))
        total += term
        if fabs(term) <= 1e-17 * fabs(total):
            break
        k += 1
    if fabs(total) < TINY:
        return 0.0
    return total


cdef double _bessel_miller(int n, double x, int start) noexcept nogil:
    cdef double tox = 2.0 / x
    cdef double bjp = 0.0
    cdef double bj = 1.0
    cdef double bjm
    cdef double even_sum = 0.0
    cdef double ans = 0.0
    cdef int j
    for j in range(start, 0, -1):
        bjm = j * tox * bj - bjp
        bjp = bj
        bj = bjm
        if fabs(bj) > BIG:
            bj *= SMALL
            bjp *= SMALL
            ans *= SMALL
            even_sum *= SMALL
        if j == n + 1:
            ans = bj
        if (j - 1) % 2 == 0 and j > 1:
            even_sum += bj
    if n == 0:
        return bj / (bj + 2.0 * even_sum)
    return ans / (bj + 2.0 * even_sum)


cdef void _bessel_column(int nmax, double u, int start, double* work,
                         double* out) noexcept nogil:
    """Fill out[0..nmax] with J_n(u) using work[0..start]."""
    cdef double tox, bj, bjp, bjm, even_sum, norm
    cdef int j, i
    if u == 0.0:
        out[0] = 1.0
        for i in range(1, nmax + 1):
            out[i] = 0.0
        return
    tox = 2.0 / u
    bjp = 0.0
    bj = 1.0
    even_sum = 0.0
    work[start] = 1.0
    for j in range(start, 0, -1):
        bjm = j * tox * bj - bjp
        bjp = bj
        bj = bjm
        if fabs(bj) > BIG:
            bj *= SMALL
            bjp *= SMALL
            even_sum *= SMALL
            for i in range(j, start + 1):
                work[i] *= SMALL
        work[j - 1] = bj
        if (j - 1) % 2 == 0 and j > 1:
            even_sum += bj
    norm = work[0] + 2.0 * even_sum
    for i in range(nmax + 1):
        out[i] = work[i] / norm


def g_parallel(double x):
    return _gpar(x)


def g_perp(double x):
    return _gperp(x)


def g_parallel_array(x):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=float).ravel()
    out = np.empty(xv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(xv.shape[0]):
            ov[i] = _gpar(xv[i])
    return out.reshape(np.shape(x))


def g_perp_array(x):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=float).ravel()
    out = np.empty(xv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(xv.shape[0]):
            ov[i] = _gperp(xv[i])
    return out.reshape(np.shape(x))


def h_phi(double x, double psi):
    return _hphi(x, psi)


def h_rho(double x, double psi):
    return _hrho(x, psi)


def braces(int q, double x, double phi, int pol):
    return _braces(q, x, phi, pol)


def braces_array(int q, x, phi, int pol):
    cdef double[::1] xv = np.ascontiguousarray(x, dtype=float)
    cdef double[::1] pv = np.ascontiguousarray(phi, dtype=float)
    out = np.empty(xv.shape[0])
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(xv.shape[0]):
            ov[i] = _braces(q, xv[i], pv[i], pol)
    return out


def bessel_j(int n, double x):
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    cdef double v
    if x < SERIES_X or x * x < 4.0 * (n + 1):
        return _bessel_series(n, x)
    v = _bessel_miller(n, x, miller_start(n, x))
    return 0.0 if fabs(v) < TINY else v


def bessel_table(int nmax, u):
    """J_0..J_nmax at each entry of ``u``; shape (len(u), nmax + 1)."""
    cdef double[::1] uv = np.ascontiguousarray(u, dtype=float)
    cdef Py_ssize_t m = uv.shape[0]
    out = np.zeros((m, nmax + 1))
    if m == 0:
        return out
    cdef double[:, ::1] ov = out
    cdef int start = miller_start(nmax, float(np.max(u)))
    cdef double* work = <double*> malloc((start + 1) * sizeof(double))
    if work == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    try:
        with nogil:
            for i in range(m):
                _bessel_column(nmax, uv[i], start, work, &ov[i, 0])
    finally:
        free(work)
    return out
