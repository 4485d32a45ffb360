"""Benchmark the compiled kernels against the NumPy fallback.

Usage: python3 benchmarks/bench_kernels.py [--repeats N]

Each kernel runs on a realistic per-sample workload (a full 50,176-byte
buffer, a multi-megabyte bigram source, a 224x224 GLCM plane, the order-8
Hilbert table) in both backends, reporting best-of-N wall time and speedup.
"""

import argparse
import time

import numpy as np

from binviz import BUFFER_LEN
from binviz._kernels import pure

try:
    from binviz._kernels import _native as native
except ImportError:
    native = None


def bench(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    buf = rng.integers(0, 256, BUFFER_LEN, dtype=np.uint8)
    big = rng.integers(0, 256, 4 * 1024 * 1024, dtype=np.uint8)
    plane = rng.integers(0, 16, (224, 224)).astype(np.int64)

    workloads = [
        ("entropy_series (50,176 B)", "entropy_series", (buf,)),
        ("bigram_counts (4 MiB)", "bigram_counts", (big,)),
        ("glcm_counts (224x224)", "glcm_counts", (plane, 0, 1, 16)),
        ("hilbert_coords (order 8)", "hilbert_coords", (8, 65536)),
    ]

    if native is None:
        print("compiled backend not built; timing the NumPy fallback only")
    header = f"{'kernel':<28} {'pure':>10} {'native':>10} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for label, name, call_args in workloads:
        t_pure = bench(getattr(pure, name), call_args, args.repeats)
        if native is not None:
            t_nat = bench(getattr(native, name), call_args, args.repeats)
            print(f"{label:<28} {t_pure * 1e3:>8.2f}ms {t_nat * 1e3:>8.2f}ms "
                  f"{t_pure / t_nat:>7.1f}x")
        else:
            print(f"{label:<28} {t_pure * 1e3:>8.2f}ms {'-':>10} {'-':>8}")


if __name__ == "__main__":
    main()
