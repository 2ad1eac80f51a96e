#!/usr/bin/env python3
"""Compare the compiled and pure-Python kernels on the two hot paths:
the exhaustive Hilbert-symbol oracle and the conic fiber scan.

Usage: python benchmarks/bench_backends.py [--height H]
"""

import argparse
import time

from chatelet._kernel import pure
from chatelet.local import default_oracle_precision

try:
    from chatelet._kernel import _fast as fast
except ImportError:
    fast = None


def bench_oracle(kernel):
    t0 = time.perf_counter()
    n = 0
    for p in (2, 3, 5, 7, 11, 13):
        for a in range(-20, 21):
            if a == 0:
                continue
            for b in range(-20, 21):
                if b == 0:
                    continue
                kernel.oracle_symbol(a, b, p,
                                     default_oracle_precision(a, b, p))
                n += 1
    return n, time.perf_counter() - t0


def bench_scan(kernel, H):
    # the constructed counterexample: every fiber is decided, none found
    coeffs = (5916, 0, 985, 0, 41)
    t0 = time.perf_counter()
    hits = kernel.conic_scan(coeffs, 697, (17, 41), H, 16)
    return len(hits), time.perf_counter() - t0


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--height", type=int, default=150)
    args = parser.parse_args()

    kernels = [("pure", pure)]
    if fast is not None:
        kernels.insert(0, ("fast", fast))
    else:
        print("compiled kernel unavailable; benchmarking pure only")

    print(f"{'kernel':<8} {'oracle grid':>14} {'scan H=' + str(args.height):>14}")
    times = {}
    for name, kernel in kernels:
        n, t_oracle = bench_oracle(kernel)
        hits, t_scan = bench_scan(kernel, args.height)
        times[name] = (t_oracle, t_scan)
        print(f"{name:<8} {t_oracle:>12.3f}s {t_scan:>13.3f}s"
              f"   ({n} symbols, {hits} fibers found)")
    if len(times) == 2:
        so = times["pure"][0] / times["fast"][0]
        ss = times["pure"][1] / times["fast"][1]
        print(f"speedup  {so:>13.1f}x {ss:>13.1f}x")


if __name__ == "__main__":
    main()
