"""Parameter sweeps, figure presets, CSV output and the verification runner."""

import configparser
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import mode_oracle, specfun, wedge_rates
from ._series import SERIES_SWITCH
from .errors import NonConvergenceError, TruncationError, WedgeDomainError
from .wedge_rates import POLARIZATIONS, AtomPosition, WedgeGeometry

MODES = ("point", "radial", "angular", "bisector", "surface")
CSV_HEADER = "x,phi,rate_rho,rate_phi,rate_z,rate_total"
DEFAULT_1D_COUNT = 500
DEFAULT_SURFACE_COUNTS = (200, 100)
FIG6_Q_VALUES = (30, 60, 90)


class UsageError(ValueError):
    """Invalid scan or command-line input; ``field`` names the culprit."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


@dataclass(frozen=True)
class ScanSpec:
    """A sweep over positions in a wedge.

    ``x_range`` and ``phi_range`` are ``(min, max, count)`` with inclusive
    end points; a fixed value is ``(v, v, 1)``.  Bisector scans ignore
    ``phi_range`` and use phi = alpha/2.
    """

    q: int
    mode: str
    x_range: tuple
    phi_range: tuple = None
    polarizations: tuple = ("rho", "phi", "z", "total")
    dipole_weights: tuple = (1 / 3, 1 / 3, 1 / 3)
    output_path: Optional[str] = None

    def geometry(self):
        return WedgeGeometry(self.q)


@dataclass(frozen=True)
class ScanRow:
    x: float
    phi: float
    rate_rho: float
    rate_phi: float
    rate_z: float
    rate_total: float


def _check_range(name, rng):
    try:
        lo, hi, count = rng
        lo, hi = float(lo), float(hi)
    except (TypeError, ValueError):
        raise UsageError(name, f"expected (min, max, count), got {rng!r}") from None
    if int(count) != count or count < 1:
        raise UsageError(name, f"count must be an integer >= 1, got {count!r}")
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise UsageError(name, "bounds must be finite")
    if lo > hi:
        raise UsageError(name, f"min {lo} exceeds max {hi}")
    if count == 1 and lo != hi:
        raise UsageError(name, "a single-point range needs min == max")
    return lo, hi, int(count)


def validate_spec(spec: ScanSpec) -> ScanSpec:
    try:
        geom = spec.geometry()
    except WedgeDomainError as exc:
        raise UsageError("q", str(exc)) from None
    if spec.mode not in MODES:
        raise UsageError("mode", f"must be one of {', '.join(MODES)}")
    x_range = _check_range("x_range", spec.x_range)
    if x_range[0] < 0.0:
        raise UsageError("x_range", "x must be >= 0")
    if spec.mode == "bisector":
        half = 0.5 * geom.alpha
        phi_range = (half, half, 1)
    else:
        if spec.phi_range is None:
            raise UsageError("phi_range", f"required for mode {spec.mode!r}")
        phi_range = _check_range("phi_range", spec.phi_range)
        slack = 1e-12 * geom.alpha
        if phi_range[0] < -slack or phi_range[1] > geom.alpha + slack:
            raise UsageError("phi_range", f"must lie in [0, pi/q] = [0, {geom.alpha!r}]")
    fixed = {"point": ("x_range", "phi_range"), "radial": ("phi_range",), "angular": ("x_range",)}
    for name in fixed.get(spec.mode, ()):
        rng = x_range if name == "x_range" else phi_range
        if rng[2] != 1:
            raise UsageError(name, f"mode {spec.mode!r} needs a single value")
    pols = tuple(spec.polarizations)
    bad = [p for p in pols if p not in POLARIZATIONS + ("total",)]
    if bad or not pols:
        raise UsageError("polarizations", f"invalid selection {pols!r}")
    try:
        weights = wedge_rates.check_weights(spec.dipole_weights)
    except WedgeDomainError as exc:
        raise UsageError("dipole_weights", str(exc)) from None
    return replace(spec, q=geom.q, x_range=x_range, phi_range=phi_range,
                   polarizations=pols, dipole_weights=weights)


def _axis(rng):
    lo, hi, count = rng
    if count == 1:
        return np.array([lo])
    return np.linspace(lo, hi, count)


def _evaluate_chunk(geom, xs, phis, weights):
    rates = [1.5 * wedge_rates.braces_grid(geom, xs, phis, p) for p in POLARIZATIONS]
    total = weights[0] * rates[0] + weights[1] * rates[1] + weights[2] * rates[2]
    return rates + [total]


def run_scan(spec: ScanSpec, threads: int = 1) -> list:
    """Evaluate every grid point of ``spec``; x is the outer loop, phi the inner."""
    spec = validate_spec(spec)
    geom = spec.geometry()
    xs_axis = _axis(spec.x_range)
    phis_axis = np.clip(_axis(spec.phi_range), 0.0, geom.alpha)
    xs = np.repeat(xs_axis, phis_axis.size)
    phis = np.tile(phis_axis, xs_axis.size)

    threads = max(1, int(threads))
    if threads == 1 or xs.size < 2 * threads:
        columns = _evaluate_chunk(geom, xs, phis, spec.dipole_weights)
    else:
        bounds = np.linspace(0, xs.size, threads + 1).astype(int)
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(
                lambda i: _evaluate_chunk(geom, xs[bounds[i]:bounds[i + 1]],
                                          phis[bounds[i]:bounds[i + 1]], spec.dipole_weights),
                range(threads),
            ))
        columns = [np.concatenate([p[k] for p in parts]) for k in range(4)]
    return [
        ScanRow(float(x), float(p), float(a), float(b), float(c), float(t))
        for x, p, a, b, c, t in zip(xs, phis, *columns)
    ]


def figure_preset(fig_id: int, q: int = None) -> ScanSpec:
    """Canned scan reproducing one of the published figures.

    Figures 2 and 3 are (x, phi) surfaces in the pi/3 wedge for the z and
    phi polarizations.  Figure 6 is a bisector scan for an atom polarizable
    along rho and z only; it was drawn for several q, of which 60 and 90
    are named, so ``q`` picks one of ``FIG6_Q_VALUES`` (default 60).
    """
    if fig_id in (2, 3):
        if q not in (None, 3):
            raise UsageError("q", f"figure {fig_id} is fixed at q = 3")
        return ScanSpec(
            q=3,
            mode="surface",
            x_range=(0.0, 12.0, DEFAULT_SURFACE_COUNTS[0] + 1),
            phi_range=(0.0, math.pi / 3, DEFAULT_SURFACE_COUNTS[1] + 1),
            polarizations=("z",) if fig_id == 2 else ("phi",),
            dipole_weights=(0.0, 0.0, 1.0) if fig_id == 2 else (0.0, 1.0, 0.0),
        )
    if fig_id == 6:
        q = 60 if q is None else q
        if q not in FIG6_Q_VALUES:
            raise UsageError("q", f"figure 6 presets exist for q in {FIG6_Q_VALUES}")
        return ScanSpec(
            q=q,
            mode="bisector",
            x_range=(0.0, 4.0 * q, 1201),
            polarizations=("total",),
            dipole_weights=(0.5, 0.0, 0.5),
        )
    raise UsageError("figure", f"unknown figure id {fig_id!r}; choose 2, 3 or 6")


@dataclass(frozen=True)
class JumpMetrics:
    """Suppression and jump structure of one bisector curve.

    ``suppression_ratio`` compares the peak just past x = q with the peak
    over (0.2q, 0.8q).  ``rise_2q`` and ``rise_3q`` are the largest climb
    above the running minimum inside (1.8q, 2.2q) and (2.8q, 3.2q).
    """

    q: int
    suppression_ratio: float
    rise_2q: float
    rise_3q: float

    @property
    def jump_ratio(self) -> float:
        return self.rise_3q / self.rise_2q if self.rise_2q > 0.0 else math.inf


def _window(x, rate, lo, hi):
    sel = (x > lo) & (x < hi)
    if not sel.any():
        raise UsageError("x_range", f"scan has no points in ({lo:g}, {hi:g})")
    return rate[sel]


def jump_metrics(rows, q: int) -> JumpMetrics:
    """Measure the figure-6 jump structure of bisector ``rows`` (by rate_total)."""
    x = np.array([r.x for r in rows])
    rate = np.array([r.rate_total for r in rows])

    def rise(lo, hi):
        v = _window(x, rate, lo * q, hi * q)
        return float(np.max(v - np.minimum.accumulate(v)))

    floor = float(np.max(_window(x, rate, 0.2 * q, 0.8 * q)))
    peak = float(np.max(_window(x, rate, 1.0 * q, 1.2 * q)))
    ratio = peak / floor if floor > 0.0 else math.inf
    return JumpMetrics(q, ratio, rise(1.8, 2.2), rise(2.8, 3.2))


def format_number(v: float) -> str:
    # 12 significant digits, decimal point always present, no negative zero
    return format(float(v) + 0.0, "#.12g")


def format_row(row: ScanRow) -> str:
    return ",".join(format_number(v) for v in (
        row.x, row.phi, row.rate_rho, row.rate_phi, row.rate_z, row.rate_total))


def csv_text(rows) -> str:
    return "".join([CSV_HEADER + "\n"] + [format_row(r) + "\n" for r in rows])


def write_csv(rows, path) -> None:
    """Write rows in the fixed CSV layout (UTF-8, LF endings)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(csv_text(rows))


# -- configuration ----------------------------------------------------------


def load_config(path) -> dict:
    """Read a flat ``key = value`` file; ``#`` starts a comment."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    parser.optionxform = str
    with open(path, encoding="utf-8") as fh:
        parser.read_string("[wedgese]\n" + fh.read(), source=str(path))
    return {k.replace("-", "_"): v for k, v in parser["wedgese"].items()}


# -- verification -----------------------------------------------------------


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_residual: float
    bound: float
    detail: str = ""


@dataclass
class VerifyReport:
    level: str
    checks: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def lines(self):
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            extra = f"  {c.detail}" if c.detail else ""
            yield f"{status}  {c.name:<34} max={c.max_residual:.3e}  bound={c.bound:.1e}{extra}"


def _taylor_reference(x, perp):
    # 30-term Maclaurin sum; converges without cancellation for x <= 2
    t = x * x
    total = 0.0
    term_sign = -1.0 if perp else 1.0
    for k in range(30):
        num = (2 * k + 2) if perp else (2 * k + 2) ** 2
        total += term_sign * (-1) ** k * num / math.factorial(2 * k + 3) * t**k
    return total


def _check(name, bound, values, detail=""):
    worst = max(values) if values else 0.0
    return CheckResult(name, bool(worst < bound), float(worst), bound, detail)


def _guarded(name, bound, fn):
    try:
        return _check(name, bound, fn())
    except (NonConvergenceError, TruncationError) as exc:
        return CheckResult(name, False, float("inf"), bound, f"{type(exc).__name__}: {exc}")


def _kernel_continuity():
    pts = [0.0, 1e-8, 1e-4, 0.01, 0.1, 0.3]
    pts += [SERIES_SWITCH * (1 + d) for d in (-1e-9, -1e-12, 0.0, 1e-12, 1e-9)]
    pts += [0.7, 1.0, 1.5, 2.0]
    out = []
    for x in pts:
        out.append(abs(specfun.g_parallel(x) - _taylor_reference(x, perp=False)))
        out.append(abs(specfun.g_perp(x) - _taylor_reference(x, perp=True)))
    return out


def _bessel_recurrence():
    out = []
    for x in (0.5, 3.0, 17.0, 60.0, 100.0):
        for n in range(1, 201, 7):
            below, above = specfun.bessel_j(n - 1, x), specfun.bessel_j(n + 1, x)
            rhs = 2.0 * n / x * specfun.bessel_j(n, x)
            scale = max(abs(below), abs(above), abs(rhs))
            if scale > 1e-250:
                out.append(abs(below + above - rhs) / scale)
    return out


def _bessel_normalization():
    out = []
    for x in (0.1, 1.0, 10.0, 55.5, 100.0):
        n_top = int(x) + 60
        s = specfun.bessel_j(0, x) + 2.0 * math.fsum(
            specfun.bessel_j(2 * k, x) for k in range(1, n_top // 2 + 1))
        out.append(abs(s - 1.0))
    return out


def _addition_theorems():
    out = []
    for q in (1, 2, 3, 5, 10):
        for arg in (0.3, 4.0, 17.5, 30.0):
            for phi in (0.05, 0.4, 1.1):
                for trig in ("sin2", "cos2"):
                    for fam in ("J2", "m2J2", "Jp2"):
                        out.append(mode_oracle.check_addition_theorem(q, arg, phi, trig, fam))
    return out


def _single_plate():
    geom = WedgeGeometry(1)
    out = []
    for x in np.linspace(1e-3, 100.0, 400):
        pos = AtomPosition(float(x), math.pi / 2)
        big = 2.0 * x
        if big < 2.0:
            # the literal forms cancel catastrophically here
            par = 2 / 3 - _taylor_reference(big, perp=False)
            perp = 2.0 * (1 / 3 - _taylor_reference(big, perp=True))
        else:
            par = 2 / 3 - math.sin(big) / big - math.cos(big) / big**2 + math.sin(big) / big**3
            perp = 2.0 * (1 / 3 - math.cos(big) / big**2 + math.sin(big) / big**3)
        out.append(abs(wedge_rates.braces_z(geom, pos) - par))
        out.append(abs(wedge_rates.braces_phi(geom, pos) - par))
        out.append(abs(wedge_rates.braces_rho(geom, pos) - perp))
    return out


def _cusp():
    out = []
    for q in range(2, 9):
        geom = WedgeGeometry(q)
        for frac in (0.1, 0.37, 0.5, 0.9):
            pos = AtomPosition(1e-6, frac * geom.alpha)
            out += [abs(wedge_rates.braces(geom, pos, p)) for p in POLARIZATIONS]
    return out


def _plates():
    out = []
    for q in range(1, 11):
        geom = WedgeGeometry(q)
        for x in (0.0, 0.3, 2.0, 7.5, 50.0):
            for phi in (0.0, geom.alpha):
                out.append(abs(wedge_rates.braces_z(geom, AtomPosition(x, phi))))
    # exact zero is required, so report any nonzero value as infinite
    return [0.0 if v == 0.0 else math.inf for v in out]


def _free_space():
    out = []
    for q in (1, 2, 3):
        geom = WedgeGeometry(q)
        pos = AtomPosition(1e3, 0.5 * geom.alpha)
        r = wedge_rates.normalized_rates(geom, pos)
        out += [abs(r.norm_rho - 1), abs(r.norm_phi - 1), abs(r.norm_z - 1)]
    return out


def _oracle_grid(cfg, pols=POLARIZATIONS, details=None):
    out = []
    for q in (1, 2, 3, 4, 6):
        geom = WedgeGeometry(q)
        for x in (0.5, 1.0, 2.0, 5.0, 10.0, 20.0):
            for frac in (1 / 8, 1 / 4, 1 / 2):
                pos = AtomPosition(x, frac * geom.alpha)
                for pol in pols:
                    d = abs(mode_oracle.mode_sum_braces(geom, pos, pol, cfg)
                            - wedge_rates.braces(geom, pos, pol))
                    out.append(d)
                    if details is not None and d >= 1e-6:
                        details.append((q, x, frac, pol, d))
    return out


def run_verify(level: str = "fast", nodes: int = 400) -> VerifyReport:
    """Run the fast identity/limit suite, plus the oracle grid when ``level='full'``."""
    if level not in ("fast", "full"):
        raise UsageError("level", "must be 'fast' or 'full'")
    t0 = time.perf_counter()
    report = VerifyReport(level)
    add = report.checks.append
    add(_guarded("kernel series/closed-form match", 1e-13, _kernel_continuity))
    add(_guarded("bessel recurrence", 1e-11, _bessel_recurrence))
    add(_guarded("bessel normalization sum", 1e-11, _bessel_normalization))
    add(_guarded("addition theorems", 1e-10, _addition_theorems))
    add(_guarded("derivative identity", 1e-8, lambda: [
        mode_oracle.check_derivative_identity(n, x)
        for n in (0, 1, 3, 5, 12) for x in (0.1, 1.0, 10.0, 30.0)]))
    add(_guarded("angular reduction", 1e-9, lambda: [
        mode_oracle.check_angular_reduction(0, nu, a)
        for nu in (0, 1) for a in (1e-3, 1.0, math.pi, 12.0, 30.0)]))
    add(_guarded("single-plate reduction", 1e-12, _single_plate))
    add(_guarded("cusp suppression", 1e-9, _cusp))
    add(_guarded("plate suppression (exact zero)", 1.0, _plates))
    add(_guarded("free-space recovery", 7.5e-3, _free_space))
    if level == "full":
        cfg = mode_oracle.QuadratureConfig(nodes=nodes)
        for pol in POLARIZATIONS:
            misses = []
            res = _guarded(f"oracle equivalence ({pol})", 1e-6,
                           lambda: _oracle_grid(cfg, (pol,), misses))
            if misses:
                res.detail = "worst at q=%d x=%g phi=%.3f*alpha" % max(
                    misses, key=lambda m: m[-1])[:3]
            add(res)
    report.seconds = time.perf_counter() - t0
    return report
