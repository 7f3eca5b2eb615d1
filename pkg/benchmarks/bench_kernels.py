"""Time the numba and numpy paths of the Laplace-sum kernels, and one full preset run.

    python benchmarks/bench_kernels.py [--times 100000] [--repeat 3]

The numba path is used by default when numba is importable; set
TLSDECAY_NUMBA=0 to force the numpy fallback for the full run.
"""
import argparse
import time

import numpy as np

from tlsdecay import _accel
from tlsdecay.cli import load_preset
from tlsdecay.contour import DrudeLorentzContour
from tlsdecay.runner import run_scenario


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--times", type=int, default=100_000, help="number of time points")
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    contour = DrudeLorentzContour(100.0, 1.0)
    t = np.geomspace(1e-3, 5e3, args.times)
    rows = np.stack([contour.base * contour.nodes ** p for p in (1, 2)])
    coeffs = contour._shifted_coeffs(100.0)
    print(f"{contour.nodes.size} quadrature nodes, {t.size} times, numba available: "
          f"{_accel.HAVE_NUMBA}")

    paths = [False] + ([True] if _accel.HAVE_NUMBA else [])
    for use in paths:
        # warm-up compiles (or loads the cached) numba kernels
        _accel.moment_sums(t[:10], contour.nodes, rows, use_numba=use)
        _accel.laplace_sum(t[:10], contour.nodes, coeffs, use_numba=use)
        label = "numba" if use else "numpy"
        m = best_of(lambda: _accel.moment_sums(t, contour.nodes, rows, use_numba=use), args.repeat)
        s = best_of(lambda: _accel.laplace_sum(t, contour.nodes, coeffs, use_numba=use), args.repeat)
        print(f"{label:>6}: moment_sums {m:7.3f} s   laplace_sum {s:7.3f} s")
    if len(paths) == 2:
        a = _accel.moment_sums(t, contour.nodes, rows, use_numba=True)
        b = _accel.moment_sums(t, contour.nodes, rows, use_numba=False)
        print(f"max relative difference between paths: {np.max(np.abs(a - b) / np.abs(b)):.2e}")

    cfg = load_preset("fig2")
    print(f"full fig2 run ({'numba' if _accel.USE_NUMBA else 'numpy'}): "
          f"{best_of(lambda: run_scenario(cfg), 1):.2f} s")


if __name__ == "__main__":
    main()
