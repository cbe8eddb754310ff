"""Time the compiled and numpy simulation kernels on the same trials.

    python3 benchmarks/bench_kernels.py [--trials N] [--seed S]

Both backends must produce identical ranks; the script exits 1 if they do not.
"""

import argparse
import sys
import time

import numpy as np

from robbins import _backend, exact, montecarlo
from robbins.memoryless import optimize


def timed(policy, trials, seed, backend):
    t = time.perf_counter()
    r = montecarlo.ranks(policy, seed, 0, trials, backend)
    return time.perf_counter() - t, r


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--trials", type=int, default=2_000_000)
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args(argv)

    if _backend.compiled is None:
        print("compiled kernels not built; only the numpy backend is available")
    policies = [exact.policy3(), exact.policy4(), optimize(10)[0].policy("memoryless:10")]
    print(f"{'policy':<14}{'python s':>10}{'compiled s':>12}{'speedup':>9}  identical")
    mismatch = False
    for p in policies:
        tp, rp = timed(p, args.trials, args.seed, "python")
        if _backend.compiled is None:
            print(f"{p.name:<14}{tp:>10.3f}{'-':>12}{'-':>9}  -")
            continue
        tc, rc = timed(p, args.trials, args.seed, "compiled")
        same = bool(np.array_equal(rp, rc))
        mismatch |= not same
        print(f"{p.name:<14}{tp:>10.3f}{tc:>12.3f}{tp / tc:>8.1f}x  {same}")
    return 1 if mismatch else 0


if __name__ == "__main__":
    sys.exit(main())
