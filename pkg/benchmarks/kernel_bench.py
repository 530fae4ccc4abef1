"""Timing comparison of the numba kernels against the numpy fallbacks.

Runs the pocket and linear-machine training loops on identical inputs
through both implementations and prints wall-clock times plus the speedup.
The fallbacks follow the same decision sequence, so the returned accuracies
must agree; the script asserts that as a sanity check.

Usage: python benchmarks/kernel_bench.py [--visits N] [--examples N]
"""

import argparse
import time

import numpy as np

from pairnet import _kernels
from pairnet._kernels import build_visit_order, lm_loop_numpy, pocket_loop_numpy


def make_problem(n, m, seed=0):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, m))
    xb = np.ascontiguousarray(np.hstack([np.ones((n, 1)), X]))
    targets = rng.choice([-1.0, 1.0], size=n)
    targets[:2] = (1.0, -1.0)
    y0 = rng.integers(0, 16, size=n).astype(np.int64)
    y0[:16] = np.arange(16)
    return xb, targets, y0


def bench(fn, args, repeats=3):
    best = float("inf")
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--visits", type=int, default=200_000)
    parser.add_argument("--examples", type=int, default=1500)
    parser.add_argument("--features", type=int, default=72)
    args = parser.parse_args()

    if not _kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    xb, targets, y0 = make_problem(args.examples, args.features)
    order = build_visit_order(
        args.examples, args.visits, np.random.default_rng(1), shuffle=True
    )

    print(f"problem: n={args.examples}, m={args.features}, visits={args.visits}")
    print(f"{'kernel':<22}{'numba':>12}{'numpy':>12}{'speedup':>10}")

    _kernels.warm_kernels()

    # real-valued data can flip a decision on a last-ulp activation, so the
    # sanity check here is loose; the bit-exact equivalence test lives in
    # tests/test_kernels.py on an integer grid
    t_nb, r_nb = bench(_kernels.pocket_loop_numba, (xb, targets, order, 1.0, args.visits))
    t_np, r_np = bench(pocket_loop_numpy, (xb, targets, order, 1.0, args.visits), repeats=1)
    assert abs(r_nb[1] - r_np[1]) < 0.05, "paths disagree on pocket accuracy"
    print(f"{'pocket_loop':<22}{t_nb:>11.3f}s{t_np:>11.3f}s{t_np / t_nb:>9.1f}x")

    t_nb, r_nb = bench(_kernels.lm_loop_numba, (xb, y0, 16, order, 1.0, args.visits))
    t_np, r_np = bench(lm_loop_numpy, (xb, y0, 16, order, 1.0, args.visits), repeats=1)
    assert abs(r_nb[1] - r_np[1]) < 0.05, "paths disagree on machine accuracy"
    print(f"{'lm_loop':<22}{t_nb:>11.3f}s{t_np:>11.3f}s{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
