#!/usr/bin/env python3
"""Benchmark the compiled sampling kernels against the numpy fallback.

Runs the counter-based uniform generator and the per-sample uncertainty
pipeline on both backends, reports throughput and the worst relative
deviation between them.

    python benchmarks/kernel_bench.py --samples 2000000 --repeats 5
"""

import argparse
import time

import numpy as np

from masertur import _kernels_py
from masertur.explorer import STANDARD_RANGES

try:
    from masertur import _kernels_cy
except ImportError:
    _kernels_cy = None


def best_time(func, repeats):
    timings = []
    for _ in range(repeats):
        start = time.perf_counter()
        func()
        timings.append(time.perf_counter() - start)
    return min(timings)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--samples", type=int, default=2_000_000)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    backends = {"python": _kernels_py}
    if _kernels_cy is not None:
        backends["compiled"] = _kernels_cy
    else:
        print("compiled kernel not built; benchmarking the fallback only")

    n = args.samples
    streams = _kernels_py.uniform_streams(args.seed, 0, n, 6)
    columns = [lo + streams[k] * (hi - lo) for k, (lo, hi) in enumerate(STANDARD_RANGES)]
    gu, gl, nu, nl, eps, dlt = columns
    keep = np.abs(nl - nu) >= 1e-3
    gu, gl, nu, nl, eps, dlt = (c[keep] for c in columns)

    print(f"samples: {n}  (uncertainty pipeline on {keep.sum()} valid rows)")
    header = f"{'kernel':24s} " + "".join(f"{name:>14s}" for name in backends)
    print(header)

    rows = {
        "uniform_streams": lambda impl: impl.uniform_streams(args.seed, 0, n, 6),
        "batch_uncertainty": lambda impl: impl.batch_uncertainty(gu, gl, nu, nl, eps, dlt),
    }
    timings = {}
    for label, call in rows.items():
        cells = []
        for name, impl in backends.items():
            elapsed = best_time(lambda: call(impl), args.repeats)
            timings[(label, name)] = elapsed
            cells.append(f"{elapsed * 1e3:11.1f} ms")
        print(f"{label:24s} " + "".join(f"{c:>14s}" for c in cells))

    if _kernels_cy is not None:
        for label in rows:
            ratio = timings[(label, "python")] / timings[(label, "compiled")]
            print(f"{label}: compiled is {ratio:.2f}x the numpy fallback")
        ours = _kernels_py.batch_uncertainty(gu, gl, nu, nl, eps, dlt)
        theirs = _kernels_cy.batch_uncertainty(gu, gl, nu, nl, eps, dlt)
        worst = max(
            float(np.max(np.abs(a - b) / np.maximum(np.abs(a), 1e-300)))
            for a, b in zip(ours, theirs)
        )
        exact = all(
            np.array_equal(a, b)
            for a, b in zip(
                _kernels_py.uniform_streams(args.seed, 0, 4096, 6),
                _kernels_cy.uniform_streams(args.seed, 0, 4096, 6),
            )
        )
        print(f"uniform streams bitwise identical: {exact}")
        print(f"uncertainty pipeline worst relative deviation: {worst:.2e}")


if __name__ == "__main__":
    main()
