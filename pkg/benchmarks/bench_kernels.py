"""Compiled orbit kernels against the NumPy fallback.

    python benchmarks/bench_kernels.py [--steps 2000] [--points 1000] [--repeat 3]

Both implementations are run on identical inputs; the script also checks
that their outputs agree bitwise.
"""

import argparse
import time

import numpy as np

from ietlab import kernels
from ietlab.groups import SU2, U1, haar_tuple
from ietlab.streams import random_iet, substream


def bench(impl, kind, fiet, table, x0, y0, steps, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        x, y = x0.copy(), y0.copy()
        start = time.perf_counter()
        kernels.advance(kind, fiet, table, x, y, steps, impl=impl)
        best = min(best, time.perf_counter() - start)
        out = (x, y)
    return best, out


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--points", type=int, default=1000)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()

    if "compiled" not in kernels.IMPLEMENTATIONS:
        print("compiled extension not available; only the fallback can run")
    T = random_iet(substream(0, "base"), 4, arithmetic="float")
    fiet = kernels.float_iet(T)
    rng = np.random.default_rng(0)
    print(f"{'group':6} {'impl':9} {'seconds':>9} {'Mstep/s':>9}")
    for G in (U1(), SU2()):
        table = haar_tuple(G, 4, substream(0, "tuple")).as_array()
        x0 = rng.random(args.points)
        y0 = G.sample_batch(rng, args.points)
        results = {}
        for name, impl in sorted(kernels.IMPLEMENTATIONS.items()):
            sec, out = bench(impl, G.kernel_kind, fiet, table, x0, y0, args.steps, args.repeat)
            results[name] = (sec, out)
            rate = args.steps * args.points / sec / 1e6
            print(f"{G.name:6} {name:9} {sec:9.4f} {rate:9.2f}")
        if len(results) == 2:
            (sc, oc), (sp, op) = results["compiled"], results["python"]
            same = all(np.array_equal(a, b) for a, b in zip(oc, op))
            print(f"{G.name:6} speedup {sp / sc:.1f}x, outputs identical: {same}")


if __name__ == "__main__":
    main()
