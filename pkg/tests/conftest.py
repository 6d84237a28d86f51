"""Shared fixtures and extended-precision reference values."""

import mpmath
import pytest

from wedgese._backend import available_backends

BACKENDS = available_backends()


@pytest.fixture(params=sorted(BACKENDS))
def backend(request):
    """Each importable kernel module in turn (compiled and pure Python)."""
    return BACKENDS[request.param]


def ref_g_parallel(x, dps=50):
    """Literal sin x/x + cos x/x^2 - sin x/x^3 at ``dps`` digits; 2/3 at 0."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        if x == 0:
            return mpmath.mpf(2) / 3
        s, c = mpmath.sin(x), mpmath.cos(x)
        return s / x + c / x**2 - s / x**3


def ref_g_perp(x, dps=50):
    """Literal cos x/x^2 - sin x/x^3 at ``dps`` digits; -1/3 at 0."""
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        if x == 0:
            return -mpmath.mpf(1) / 3
        return mpmath.cos(x) / x**2 - mpmath.sin(x) / x**3


def ref_bessel_j(n, x):
    """J_n(x) from the ascending power series summed in extended precision.

    The working precision grows with x so the alternating series keeps
    about 30 correct digits after cancellation.
    """
    dps = 30 + int(0.45 * x) + 10
    with mpmath.workdps(dps):
        h = mpmath.mpf(x) / 2
        term = h**n / mpmath.factorial(n)
        total = term
        k = 0
        while True:
            k += 1
            term *= -h * h / (k * (n + k))
            total += term
            if term == 0 or abs(term) < abs(total) * mpmath.mpf(10) ** (-dps + 5):
                if k > h:
                    break
        return float(total)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
