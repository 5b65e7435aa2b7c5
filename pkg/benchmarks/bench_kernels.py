#!/usr/bin/env python3
"""Compare kernel backends on the package's hot paths.

Times the pair-sampling inner products used by the Gram spot check (the
dominant cost when auditing large ensembles) and a batched field matmul,
once per available backend.  Outputs agree exactly across backends; this
script asserts that before reporting timings.
"""

import argparse
import time

import numpy as np

from designforge import kernels
from designforge.ffcore import build_field
from designforge.ffdesigns import gabor_ensemble
from designforge.fflinalg import frobenius_array


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pairs", type=int, default=100_000,
                    help="random Gram pairs to sample (default 100000)")
    ap.add_argument("--matmul-size", type=int, default=200,
                    help="square field-matrix size (default 200)")
    ap.add_argument("--repeat", type=int, default=3,
                    help="repetitions per measurement, best kept (default 3)")
    args = ap.parse_args()

    ens = gabor_ensemble(7, 12, 8)
    ctx = ens.ctx
    xf = frobenius_array(ctx, ens.data)
    rng = np.random.default_rng(0)
    ki = rng.integers(0, ens.n, size=args.pairs).astype(np.int64)
    kj = rng.integers(0, ens.n, size=args.pairs).astype(np.int64)

    f9 = build_field(3, 2)
    m = args.matmul_size
    ma = rng.integers(0, 3, size=(m, m, 2)).astype(np.int64)
    mb = rng.integers(0, 3, size=(m, m, 2)).astype(np.int64)

    workloads = [
        (
            f"gram pairs (n=5329, d=73, {args.pairs} pairs)",
            lambda: kernels.gather_dot(xf, ens.data, ki, kj, ctx.red, ctx.p),
        ),
        (
            f"field matmul ({m}x{m} over F_9)",
            lambda: kernels.matmul(ma, mb, f9.red, f9.p),
        ),
    ]

    original = kernels.backend()
    names = kernels.available_backends()
    print(f"backends: {', '.join(names)}")
    print(f"{'workload':<44} {'backend':<8} {'best (s)':>10} {'vs numpy':>9}")
    try:
        for label, fn in workloads:
            reference = None
            times = {}
            for name in names:
                kernels.set_backend(name)
                out = fn()  # warm-up; JIT compiles here on the compiled path
                if reference is None:
                    reference = out
                else:
                    assert np.array_equal(out, reference), f"{name} disagrees on {label}"
                times[name] = best_of(fn, args.repeat)
            base = times["numpy"]
            for name in names:
                rel = "" if name == "numpy" else f"{base / times[name]:>8.1f}x"
                print(f"{label:<44} {name:<8} {times[name]:>10.3f} {rel:>9}")
    finally:
        kernels.set_backend(original)


if __name__ == "__main__":
    main()
