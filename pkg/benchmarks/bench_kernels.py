"""Timing comparison for the hot kernels: jitted build versus numpy fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py

The script times the four kernels in the current process (jitted when
numba is importable), then re-runs itself in a subprocess with
RSMIRNOV_NO_NUMBA=1 to time the pure-numpy path, and prints the two
columns side by side.  Compilation happens during warmup, so the numbers
are steady-state.  Workload sizes match what one disk extraction at
resolution 512 actually pushes through the kernels.
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from rsmirnov import _kernels
from rsmirnov.fixtures import double_slit, fourth_power_map


def _time(fn, repeats=5):
    fn()  # warmup; compiles on the jitted path
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run_benchmarks():
    f4 = fourth_power_map()
    ds = double_slit()
    res = 512

    grid = np.linspace(-0.95, 0.95, res)
    pts = (grid[None, :] + 1j * grid[:, None]).ravel()

    rng = np.random.default_rng(0)
    poly8 = rng.normal(size=9) + 1j * rng.normal(size=9)
    guesses = 0.7 * np.exp(2j * np.pi * (np.arange(8) + 0.25) / 8)

    band = 2.5 / res
    margin = 1.0 / res
    f4_args = (f4.num.coeffs, f4.den.coeffs, f4.w_poly().coeffs)
    ds_args = (ds.num.coeffs, ds.den.coeffs, ds.w_poly().coeffs)

    def bench_horner():
        _kernels.horner_many(f4.num.coeffs, pts)

    def bench_aberth():
        for _ in range(512):
            _kernels.aberth_iterate(poly8, guesses)

    def bench_classify():
        _kernels.classify_grid(*f4_args, res, margin, band)

    def bench_trace():
        for _ in range(30):
            _kernels.trace_arc(*ds_args, 0.05 + 0.0j, 1.0)
            _kernels.trace_arc(*ds_args, 0.05 + 0.0j, -1.0)

    return {
        "horner_many (262k pts, deg 4)": _time(bench_horner),
        "aberth_iterate (512 solves, deg 8)": _time(bench_aberth),
        "classify_grid (res 512)": _time(bench_classify),
        "trace_arc (60 arcs)": _time(bench_trace),
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "--json", action="store_true",
        help="print raw timings as JSON (used by the subprocess re-run)",
    )
    args = parser.parse_args(argv)

    timings = run_benchmarks()
    if args.json:
        json.dump(timings, sys.stdout)
        return 0

    if not _kernels.USE_NUMBA:
        print("numba not active in this process; single column:")
        for name, t in timings.items():
            print("  %-36s %8.1f ms" % (name, 1e3 * t))
        return 0

    env = dict(os.environ, RSMIRNOV_NO_NUMBA="1")
    out = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--json"],
        env=env, capture_output=True, text=True, check=True,
    )
    fallback = json.loads(out.stdout)

    print("%-36s %10s %10s %9s" % ("kernel", "numba", "numpy", "speedup"))
    for name, t in timings.items():
        tf = fallback[name]
        print(
            "%-36s %8.1f ms %8.1f ms %8.1fx" % (name, 1e3 * t, 1e3 * tf, tf / t)
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
