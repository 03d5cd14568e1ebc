"""Time the compiled and numpy kernel backends on the same inputs.

    python3 benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit
from math import comb

import numpy as np

from vbma import _kernels
from vbma.forms import wedge_table
from vbma.rank2 import random_pairs


def wedge_case(rng, n=4, r=4, batch=256):
    tf, tg, to, fac = wedge_table(n, 1, 1, 1, 1)
    F = rng.standard_normal((batch, n * n, r, r)) + 1j * rng.standard_normal((batch, n * n, r, r))
    G = rng.standard_normal((1, n * n, r, r)) + 1j * rng.standard_normal((1, n * n, r, r))
    shape = (batch, comb(n, 2) ** 2, r, r)

    def run(mod):
        out = np.zeros(shape, dtype=complex)
        mod.wedge_accumulate(F, G, tf, tg, to, fac, out)
        return out
    return run


def pairing_case(rng, count=100_000):
    B, X, lam = random_pairs(rng, count)
    return lambda mod: mod.rank2_pairings(B, X, lam)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()
    rng = np.random.default_rng(0)
    cases = {"wedge_accumulate (n=4, r=4, batch 256)": wedge_case(rng),
             "rank2_pairings (1e5 pairs)": pairing_case(rng)}
    print(f"active backend: {_kernels.BACKEND}")
    for label, fn in cases.items():
        results = {name: fn(mod) for name, mod in _kernels.BACKENDS.items()}
        ref = next(iter(results.values()))
        for name, res in results.items():
            diff = np.max(np.abs(np.asarray(res) - np.asarray(ref))) / np.max(np.abs(ref))
            best = min(timeit.repeat(lambda: fn(_kernels.BACKENDS[name]),
                                     number=1, repeat=args.repeat))
            print(f"{label:42s} {name:8s} {best * 1e3:9.2f} ms   max rel diff {diff:.1e}")


if __name__ == "__main__":
    main()
