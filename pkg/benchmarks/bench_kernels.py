"""Time the configuration-enumeration kernel: compiled vs numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]

The inputs are the balls ``V_n`` enumerated by the consistency check, with
the leaves of ``W_n`` as one boundary class.
"""

import argparse
import timeit

import numpy as np

from padic_ising import build_tree, kernels

CASES = [(2, 2), (2, 3), (3, 2), (4, 2)]


def kernel_args(k, n):
    tree = build_tree(k, n)
    leaves = list(tree.sphere(n))
    return (len(tree.ball(n)), tree.edges(n), leaves, [1] * len(leaves), len(leaves) + 1, len(tree.ball(n - 1)))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    backends = ["python"] + (["cython"] if kernels.BACKEND == "cython" else [])
    print(f"{'k':>2} {'n':>2} {'spins':>5} " + " ".join(f"{b:>10}" for b in backends) + "   speedup")
    for k, n in CASES:
        a = kernel_args(k, n)
        results = {b: kernels.histogram(*a, backend=b) for b in backends}
        if len(backends) == 2:
            assert np.array_equal(results["python"], results["cython"])
        times = {
            b: min(timeit.repeat(lambda b=b: kernels.histogram(*a, backend=b), number=1, repeat=args.repeat))
            for b in backends
        }
        speed = f"{times['python'] / times['cython']:8.1f}x" if "cython" in times else "       -"
        print(f"{k:>2} {n:>2} {a[0]:>5} " + " ".join(f"{times[b]:9.4f}s" for b in backends) + "  " + speed)


if __name__ == "__main__":
    main()
