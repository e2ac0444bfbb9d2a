"""Benchmark the compiled kernels against the pure-python fallback.

Times the two raw kernels plus the two pipeline stages that lean on them
(SMOTE oversampling and a random-forest fit) under each backend:

    python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from atrisk import (ModelSpec, ResampleConfig, SimConfig, SplitSpec, encode,
                    fit, kernels, simulate, smote, split)


def timed(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def workloads():
    rng = np.random.default_rng(0)
    x = (rng.random((400, 150)) < 0.5).astype(float)
    columns = [(np.sort(rng.random(300)),
                (rng.random(300) < 0.3).astype(np.uint8))
               for _ in range(200)]

    records, manifest = simulate(SimConfig(seed=0))
    train, _ = split(encode(records, manifest, 9),
                     SplitSpec(train_fraction=0.8, seed=1))

    def bench_pairwise():
        kernels.pairwise_sqdist(x, x)

    def bench_split_scan():
        for values, labels in columns:
            kernels.split_scan(values, labels)

    def bench_smote():
        smote(train, ResampleConfig(k_neighbors=5, seed=3))

    def bench_forest():
        fit(ModelSpec("random_forest", n_trees=20, seed=3), train)

    return [
        ("pairwise_sqdist 400x400x150", bench_pairwise, 5),
        ("split_scan 200 cols x 300 rows", bench_split_scan, 5),
        ("smote 303 rows (+213 synthetic)", bench_smote, 3),
        ("random_forest 20 trees, 303x150", bench_forest, 1),
    ]


def main():
    backends = kernels.available_backends()
    if "compiled" not in backends:
        print("compiled backend not built; run "
              "'python setup.py build_ext --inplace' first")
    results = {}
    for backend in backends:
        kernels.set_backend(backend)
        for name, fn, repeats in workloads():
            results.setdefault(name, {})[backend] = timed(fn, repeats)

    width = max(len(name) for name in results)
    header = f"{'workload'.ljust(width)}  " + "".join(
        f"{b:>12}" for b in backends)
    if len(backends) > 1:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for name, timings in results.items():
        line = name.ljust(width) + "  " + "".join(
            f"{timings[b] * 1e3:>10.2f}ms" for b in backends)
        if len(backends) > 1:
            line += f"{timings['python'] / timings['compiled']:>9.1f}x"
        print(line)


if __name__ == "__main__":
    main()
