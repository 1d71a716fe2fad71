"""Benchmark the compiled kernels against the pure-numpy fallback.

Usage: python benchmarks/bench_kernels.py [--rows N] [--repeat R]
"""

import argparse
import time

import numpy as np

from activeids.forest import ForestParams, train, _flat
from activeids.kernels import _pure

try:
    from activeids.kernels import _fast
except ImportError:
    _fast = None


def timeit(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def bench_nearest_centroids(rows, cols, k, repeat):
    rng = np.random.default_rng(0)
    X = rng.normal(size=(rows, cols))
    C = X[rng.choice(rows, size=k, replace=False)]
    results = {"pure": timeit(lambda: _pure.nearest_centroids(X, C), repeat)}
    if _fast is not None:
        results["compiled"] = timeit(lambda: _fast.nearest_centroids(X, C), repeat)
        a_f, _ = _fast.nearest_centroids(X, C)
        a_p, _ = _pure.nearest_centroids(X, C)
        assert np.array_equal(a_f, a_p), "backend assignments diverge"
    return results


def bench_forest_votes(rows, cols, n_trees, repeat):
    rng = np.random.default_rng(1)
    X_train = rng.normal(size=(50, cols))
    y = (X_train[:, 0] > 0).astype(int)
    model = train(X_train, y, ForestParams(n_trees=n_trees), seed=0)
    flat = _flat(model)
    X = rng.normal(size=(rows, cols))
    args = (flat.feat, flat.thresh, flat.left, flat.right, flat.leaf, flat.roots, X)
    results = {"pure": timeit(lambda: _pure.forest_votes(*args), repeat)}
    if _fast is not None:
        results["compiled"] = timeit(lambda: _fast.forest_votes(*args), repeat)
        assert np.array_equal(_fast.forest_votes(*args), _pure.forest_votes(*args))
    return results


def report(name, results):
    pure = results["pure"]
    line = f"{name:<42} pure {pure * 1e3:9.2f} ms"
    if "compiled" in results:
        compiled = results["compiled"]
        line += f"   compiled {compiled * 1e3:9.2f} ms   speedup {pure / compiled:6.2f}x"
    else:
        line += "   (compiled kernels unavailable)"
    print(line)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--rows", type=int, default=200_000)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    print(f"rows={args.rows}, best of {args.repeat}")
    report(
        f"nearest_centroids ({args.rows}x40, k=40)",
        bench_nearest_centroids(args.rows, 40, 40, args.repeat),
    )
    report(
        f"forest_votes ({args.rows}x40, 100 trees)",
        bench_forest_votes(args.rows, 40, 100, args.repeat),
    )


if __name__ == "__main__":
    main()
