"""Compare the numba and numpy segmentation kernels.

    python3 benchmarks/bench_kernels.py [--sizes 136 500 2000] [--k-max 12] [--repeat 5]

The numba path is warmed up once before timing so compile time is excluded.
Both backends must return bitwise-equal tables; the script exits 1 otherwise.
"""
import argparse
import sys
import time

import numpy as np

from resil import _kernels


def best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def run_backend(x, y, k_max, backend):
    cost = _kernels.cost_matrix(x, y, backend)
    return cost, _kernels.dp(cost, k_max, backend)


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--sizes", type=int, nargs="+", default=[136, 500, 2000])
    p.add_argument("--k-max", type=int, default=12)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)

    if not _kernels.HAVE_NUMBA:
        print("numba is not importable; nothing to compare", file=sys.stderr)
        return 1
    rng = np.random.default_rng(0)
    warm = np.arange(8.0)
    run_backend(warm, warm, 2, "numba")

    print(f"{'n':>6} {'numpy [s]':>11} {'numba [s]':>11} {'speedup':>8}  equal")
    ok = True
    for n in args.sizes:
        x = np.arange(n, dtype=float)
        y = np.clip(0.9 - 0.3 * np.sin(x / 17.0) + rng.normal(0, 0.02, n), 0, 1)
        t_np, (c_np, (tab_np, back_np)) = best_of(
            lambda: run_backend(x, y, args.k_max, "numpy"), args.repeat)
        t_nb, (c_nb, (tab_nb, back_nb)) = best_of(
            lambda: run_backend(x, y, args.k_max, "numba"), args.repeat)
        equal = (np.array_equal(c_np, c_nb) and np.array_equal(tab_np, tab_nb)
                 and np.array_equal(back_np, back_nb))
        ok &= equal
        print(f"{n:>6} {t_np:>11.5f} {t_nb:>11.5f} {t_np / t_nb:>7.1f}x  {equal}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
