"""Compare the compiled assembly kernels against the NumPy fallback.

Times the two hot kernels (product-of-means column and pairwise-covariance
column) over a full matrix assembly for a range of register sizes.

Usage: python3 benchmarks/bench_assembly.py [--max-n 12] [--repeats 3]
"""

import argparse
import time

import numpy as np

from spamcal.assembly import KERNEL_BACKEND, mean_column, pair_column, python_kernels


def make_inputs(rng, n):
    m0 = rng.uniform(0.85, 1.0, n)
    means = np.column_stack([m0, 1.0 - m0])
    pairs = np.array(
        [(i, j) for i in range(n) for j in range(i + 1, n)], dtype=np.int64
    )
    covs = rng.uniform(-2e-4, 2e-4, (len(pairs), 2, 2))
    return means, pairs, covs


def assemble(mean_fn, pair_fn, means, pairs, covs):
    dim = 1 << means.shape[0]
    t = np.empty((dim, dim))
    for c in range(dim):
        t[:, c] = mean_fn(means) + pair_fn(means, pairs, covs)
    return t


def time_once(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-n", type=int, default=12)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    print(f"active kernel backend: {KERNEL_BACKEND}")
    print(f"{'n':>3} {'compiled [s]':>13} {'numpy [s]':>11} {'speedup':>8}")
    for n in range(4, args.max_n + 1, 2):
        means, pairs, covs = make_inputs(rng, n)
        t_fast = time_once(
            lambda: assemble(mean_column, pair_column, means, pairs, covs),
            args.repeats,
        )
        t_py = time_once(
            lambda: assemble(
                python_kernels.mean_column, python_kernels.pair_column,
                means, pairs, covs,
            ),
            args.repeats,
        )
        check = np.max(
            np.abs(
                mean_column(means) - python_kernels.mean_column(means)
            )
        )
        assert check < 1e-14, "kernel mismatch"
        print(f"{n:>3} {t_fast:>13.4f} {t_py:>11.4f} {t_py / t_fast:>8.2f}")


if __name__ == "__main__":
    main()
