"""Time the compiled and pure-Python kernels on the same workloads.

    python benchmarks/bench_backends.py [--repeat N]
"""

import argparse
import math
import timeit

import numpy as np

from wedgese._backend import available_backends
from wedgese._series import POL_PHI, POL_Z


def workloads(core):
    x = np.linspace(0.0, 100.0, 200_000)
    xs = np.linspace(0.0, 240.0, 1201)
    bisector = np.full_like(xs, math.pi / 120)
    surf_x = np.repeat(np.linspace(0.0, 12.0, 201), 101)
    surf_phi = np.tile(np.linspace(0.0, math.pi / 3, 101), 201)
    u = np.linspace(0.0, 40.0, 800)
    return {
        "g_parallel_array (2e5 points)": lambda: core.g_parallel_array(x),
        "braces scan q=60 (1201 points)": lambda: core.braces_array(60, xs, bisector, POL_Z),
        "braces surface q=3 (201x101)": lambda: core.braces_array(3, surf_x, surf_phi, POL_PHI),
        "bessel_table n<=120 (800 args)": lambda: core.bessel_table(120, u),
        "bessel_j scalar (2000 calls)": lambda: [core.bessel_j(n % 90, 0.37 * n) for n in range(2000)],
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    backends = available_backends()
    timings = {}
    for name, core in sorted(backends.items()):
        for label, fn in workloads(core).items():
            fn()  # warm caches
            best = min(timeit.repeat(fn, number=1, repeat=args.repeat))
            timings.setdefault(label, {})[name] = best

    names = sorted(backends)
    print(f"{'workload':<34}" + "".join(f"{n:>12}" for n in names) + (
        f"{'speedup':>10}" if len(names) == 2 else ""))
    for label, row in timings.items():
        line = f"{label:<34}" + "".join(f"{row[n] * 1e3:>10.2f}ms" for n in names)
        if len(names) == 2:
            line += f"{row['python'] / row['cython']:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
