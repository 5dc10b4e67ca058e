"""Time the compiled SGD kernel against the pure NumPy fallback.

Run from a checkout with the package installed:

    python3 benchmarks/bench_kernels.py --n 4000 --d 128 --k 16 --epochs 20

Both backends consume identical inputs (same precomputed shuffle order)
so the timing difference is implementation only, not batch composition.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from hexaug import kernels


def make_workload(n, d, k, epochs, batch_size, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, d))
    y = rng.integers(0, k, size=n, dtype=np.int64)
    order = np.empty((epochs, n), dtype=np.int64)
    shuffle_rng = np.random.default_rng(seed + 1)
    for e in range(epochs):
        order[e] = shuffle_rng.permutation(n)
    return X, y, order


def run_backend(fn, X, y, order, k, d, epochs, batch_size, repeats):
    times = []
    loss = None
    for _ in range(repeats):
        W = np.zeros((k, d), dtype=np.float64)
        b = np.zeros(k, dtype=np.float64)
        loss_out = np.empty(epochs, dtype=np.float64)
        start = time.perf_counter()
        bad = fn(X, y, W, b, 0.05, 1e-4, batch_size, order, loss_out)
        times.append(time.perf_counter() - start)
        assert bad == -1, f"non-finite step {bad}"
        loss = loss_out[-1]
    return min(times), loss


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4000)
    ap.add_argument("--d", type=int, default=128)
    ap.add_argument("--k", type=int, default=16)
    ap.add_argument("--epochs", type=int, default=20)
    ap.add_argument("--batch-size", type=int, default=64)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    impls = kernels.implementations()
    X, y, order = make_workload(args.n, args.d, args.k, args.epochs,
                                args.batch_size, args.seed)

    print(f"workload: n={args.n} d={args.d} k={args.k} epochs={args.epochs} "
          f"batch={args.batch_size} (best of {args.repeats})")
    print(f"active backend: {kernels.BACKEND}")
    results = {}
    for name, fn in impls.items():
        elapsed, loss = run_backend(fn, X, y, order, args.k, args.d,
                                    args.epochs, args.batch_size, args.repeats)
        results[name] = elapsed
        print(f"  {name:<10} {elapsed * 1e3:9.1f} ms   final loss {loss:.6f}")
    if "compiled" in results and "python" in results:
        print(f"speedup: {results['python'] / results['compiled']:.2f}x")
    else:
        print("speedup: n/a (compiled backend unavailable)")


if __name__ == "__main__":
    main()
