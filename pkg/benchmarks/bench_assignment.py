"""Benchmark the compiled assignment kernel against the pure-Python twin.

Run from the repository root after an editable install:

    python3 benchmarks/bench_assignment.py [--sizes 128,256,512,1024] [--repeats 3]

Costs are squared euclidean distances between Gaussian clouds, the same
shape of instance the transport oracle produces.
"""

import argparse
import time

import numpy as np

from w2assim.lap import USING_COMPILED, _dense_py
from w2assim.rng import stream

try:
    from w2assim.lap import _dense
except ImportError:
    _dense = None


def make_instance(n: int, seed: int) -> np.ndarray:
    a = stream(seed, 1).standard_normal((n, 2))
    b = stream(seed, 2).standard_normal((n, 2))
    diff = a[:, None, :] - b[None, :, :]
    return np.ascontiguousarray((diff * diff).sum(axis=-1))


def best_time(fn, cost, repeats: int) -> float:
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(cost)
        times.append(time.perf_counter() - t0)
    return min(times)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="128,256,512,1024")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    print(f"compiled kernel available: {_dense is not None} "
          f"(package selected compiled={USING_COMPILED})")
    header = f"{'n':>6} {'pure [ms]':>12} {'compiled [ms]':>14} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        cost = make_instance(n, seed=n)
        t_pure = best_time(_dense_py.lap_dense, cost, args.repeats)
        if _dense is not None:
            t_comp = best_time(_dense.lap_dense, cost, args.repeats)
            cols_p, _, _ = _dense_py.lap_dense(cost)
            cols_c, _, _ = _dense.lap_dense(cost)
            assert np.array_equal(cols_p, cols_c), "backends disagree"
            print(f"{n:>6} {t_pure * 1e3:>12.1f} {t_comp * 1e3:>14.1f} "
                  f"{t_pure / t_comp:>8.1f}x")
        else:
            print(f"{n:>6} {t_pure * 1e3:>12.1f} {'-':>14} {'-':>8}")


if __name__ == "__main__":
    main()
