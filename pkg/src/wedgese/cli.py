"""Command-line entry point ``wedgese``.

Exit codes: 0 success, 1 usage error, 2 numerical non-convergence or a
failed verification, 3 I/O error.
"""

import argparse
import math
import os
import sys

from . import mode_oracle, wedge_rates
from ._backend import BACKEND
from .cli_io import (
    DEFAULT_1D_COUNT,
    DEFAULT_SURFACE_COUNTS,
    FIG6_Q_VALUES,
    ScanRow,
    ScanSpec,
    UsageError,
    csv_text,
    figure_preset,
    load_config,
    run_scan,
    run_verify,
    write_csv,
)
from .errors import NonConvergenceError, WedgeDomainError

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC, EXIT_IO = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _triple(text):
    parts = [p for p in str(text).split(",") if p.strip()]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"expected three comma-separated values, got {text!r}")
    return tuple(float(p) for p in parts)


def _range(text):
    lo, hi, count = _triple(text)
    if count != int(count):
        raise argparse.ArgumentTypeError(f"count must be an integer, got {count!r}")
    return lo, hi, int(count)


# type converters, reused for config-file values
_TYPES = {
    "q": int, "x": float, "phi": float, "phi_frac": float, "pol": str,
    "weights": _triple, "out": str, "threads": int, "nodes": int, "format": str,
    "mode": str, "x_range": _range, "phi_range": _range, "phi_range_frac": _range,
    "level": str,
}

_DEFAULTS = {
    "threads": 1, "nodes": 400, "format": "csv", "weights": (1 / 3, 1 / 3, 1 / 3),
}


def _common(p, *, position=True):
    p.add_argument("--config", help="flat key = value file of defaults (flags override it)")
    p.add_argument("--q", type=int, help="wedge parameter q = pi/alpha (integer >= 1)")
    if position:
        p.add_argument("--x", type=float, help="dimensionless distance |k_ab| rho from the cusp")
        ang = p.add_mutually_exclusive_group()
        ang.add_argument("--phi", type=float, help="angle from one plate, radians")
        ang.add_argument("--phi-frac", type=float, help="angle from one plate as a fraction of alpha")
    p.add_argument("--pol", choices=("rho", "phi", "z", "total"))
    p.add_argument("--weights", type=_triple, help="dipole weights w_rho,w_phi,w_z summing to 1")
    p.add_argument("--out", help="output CSV path (default: stdout)")
    p.add_argument("--threads", type=int, help="worker threads for grid evaluation")
    p.add_argument("--nodes", type=int, help="oracle quadrature nodes")
    p.add_argument("--format", choices=("csv",))


def _ranges(p):
    p.add_argument("--x-range", type=_range, help="min,max,count")
    ang = p.add_mutually_exclusive_group()
    ang.add_argument("--phi-range", type=_range, help="min,max,count in radians")
    ang.add_argument("--phi-range-frac", type=_range, help="min,max,count as fractions of alpha")


def build_parser():
    parser = _Parser(prog="wedgese", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s 0.1.0 ({BACKEND} kernels)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("rate", help="normalized rates at one position")
    _common(p)
    p.add_argument("--oracle", action="store_true", help="use the brute-force mode sum")

    p = sub.add_parser("scan", help="1-D sweep (radial, angular or bisector)")
    _common(p)
    _ranges(p)
    p.add_argument("--mode", choices=("point", "radial", "angular", "bisector"))

    p = sub.add_parser("surface", help="2-D sweep over (x, phi)")
    _common(p, position=False)
    _ranges(p)

    p = sub.add_parser("figure", help="reproduce figure 2, 3 or 6 as CSV")
    p.add_argument("id", type=int, choices=(2, 3, 6))
    _common(p, position=False)
    p.add_argument("--all-q", action="store_true",
                   help=f"figure 6 only: write one file per q in {FIG6_Q_VALUES} (needs --out)")

    p = sub.add_parser("verify", help="run the numerical self-checks")
    p.add_argument("--level", choices=("fast", "full"))
    p.add_argument("--nodes", type=int)
    p.add_argument("--config")
    return parser


def _merge_config(args):
    if not getattr(args, "config", None):
        return
    values = load_config(args.config)
    for key, raw in values.items():
        if key not in _TYPES:
            raise UsageError(key, "unknown config key")
        if getattr(args, key, None) is None and hasattr(args, key):
            try:
                setattr(args, key, _TYPES[key](raw))
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise UsageError(key, str(exc)) from None


def _get(args, key, default=None):
    v = getattr(args, key, None)
    if v is None:
        v = _DEFAULTS.get(key, default)
    return v


def _require(args, key):
    v = getattr(args, key, None)
    if v is None:
        raise UsageError(key, "is required")
    return v


def _angle(args, geom):
    if getattr(args, "phi_frac", None) is not None:
        return args.phi_frac * geom.alpha
    if getattr(args, "phi", None) is not None:
        return args.phi
    return None


def _phi_range(args, geom, default_count):
    if getattr(args, "phi_range_frac", None) is not None:
        lo, hi, n = args.phi_range_frac
        return lo * geom.alpha, hi * geom.alpha, n
    if getattr(args, "phi_range", None) is not None:
        return args.phi_range
    phi = _angle(args, geom)
    if phi is not None:
        return phi, phi, 1
    return 0.0, geom.alpha, default_count


def _emit(rows, args):
    out = _get(args, "out")
    if out:
        write_csv(rows, out)
    else:
        sys.stdout.write(csv_text(rows))


def _cmd_rate(args):
    geom = wedge_rates.WedgeGeometry(_require(args, "q"))
    phi = _angle(args, geom)
    if phi is None:
        raise UsageError("phi", "give --phi or --phi-frac")
    pos = wedge_rates.AtomPosition(_require(args, "x"), phi)
    weights = wedge_rates.check_weights(_get(args, "weights"))
    if args.oracle:
        cfg = mode_oracle.QuadratureConfig(nodes=_get(args, "nodes"))
        norm = [1.5 * mode_oracle.mode_sum_braces(geom, pos, p, cfg) for p in wedge_rates.POLARIZATIONS]
    else:
        res = wedge_rates.normalized_rates(geom, pos, weights)
        norm = [res.norm_rho, res.norm_phi, res.norm_z]
    total = sum(w * n for w, n in zip(weights, norm))
    row = ScanRow(pos.x, pos.phi, norm[0], norm[1], norm[2], total)
    pol = _get(args, "pol")
    if pol is not None:
        value = {"rho": row.rate_rho, "phi": row.rate_phi, "z": row.rate_z, "total": row.rate_total}[pol]
        print(format(value + 0.0, "#.12g"))
        return EXIT_OK
    _emit([row], args)
    return EXIT_OK


def _cmd_scan(args):
    q = _require(args, "q")
    geom = wedge_rates.WedgeGeometry(q)
    mode = _get(args, "mode", "radial")
    pol = _get(args, "pol")
    x_range = _get(args, "x_range")
    if x_range is None:
        x = getattr(args, "x", None)
        x_range = (x, x, 1) if x is not None and mode in ("angular", "point") else (0.0, 10.0, DEFAULT_1D_COUNT)
    phi_range = _phi_range(args, geom, DEFAULT_1D_COUNT)
    if mode == "radial" and phi_range[2] != 1:
        raise UsageError("phi", "radial scans need a fixed --phi or --phi-frac")
    spec = ScanSpec(
        q=q, mode=mode, x_range=x_range, phi_range=phi_range,
        polarizations=(pol,) if pol else ("rho", "phi", "z", "total"),
        dipole_weights=_get(args, "weights"), output_path=_get(args, "out"),
    )
    _emit(run_scan(spec, threads=_get(args, "threads")), args)
    return EXIT_OK


def _cmd_surface(args):
    q = _require(args, "q")
    geom = wedge_rates.WedgeGeometry(q)
    pol = _get(args, "pol")
    spec = ScanSpec(
        q=q, mode="surface",
        x_range=_get(args, "x_range") or (0.0, 10.0, DEFAULT_SURFACE_COUNTS[0]),
        phi_range=_phi_range(args, geom, DEFAULT_SURFACE_COUNTS[1]),
        polarizations=(pol,) if pol else ("rho", "phi", "z", "total"),
        dipole_weights=_get(args, "weights"), output_path=_get(args, "out"),
    )
    _emit(run_scan(spec, threads=_get(args, "threads")), args)
    return EXIT_OK


def _cmd_figure(args):
    threads = _get(args, "threads")
    if args.all_q:
        if args.id != 6:
            raise UsageError("all_q", "only figure 6 has several q values")
        out = _require(args, "out")
        stem, ext = os.path.splitext(out)
        for q in FIG6_Q_VALUES:
            write_csv(run_scan(figure_preset(6, q), threads=threads), f"{stem}_q{q}{ext or '.csv'}")
        return EXIT_OK
    spec = figure_preset(args.id, getattr(args, "q", None))
    _emit(run_scan(spec, threads=threads), args)
    return EXIT_OK


def _cmd_verify(args):
    report = run_verify(_get(args, "level", "fast"), nodes=_get(args, "nodes"))
    for line in report.lines():
        print(line)
    verdict = "all checks passed" if report.passed else "FAILED"
    print(f"verify {report.level}: {verdict} in {report.seconds:.1f} s ({BACKEND} kernels)")
    return EXIT_OK if report.passed else EXIT_NUMERIC


_COMMANDS = {
    "rate": _cmd_rate, "scan": _cmd_scan, "surface": _cmd_surface,
    "figure": _cmd_figure, "verify": _cmd_verify,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _merge_config(args)
        threads = getattr(args, "threads", None)
        if threads is not None and threads < 1:
            raise UsageError("threads", "must be >= 1")
        return _COMMANDS[args.command](args)
    except (UsageError, WedgeDomainError) as exc:
        print(f"wedgese: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NonConvergenceError as exc:
        print(f"wedgese: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"wedgese: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
