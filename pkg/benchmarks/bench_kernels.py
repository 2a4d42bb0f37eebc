"""Benchmark the compiled kernels against the NumPy fallback.

Builds one realistic workload (a noisy divisor-weighted polynomial in CSR
torus form), runs each kernel on both backends, and reports best-of-three
wall times, the speedup, and a cross-backend agreement check.

Usage::

    python benchmarks/bench_kernels.py [--n 1024] [--grid 500000]
                                       [--batch 50000] [--budget 5000]

Defaults finish in under a minute on both backends; scale them up for
steadier numbers.
"""

import argparse
import math
import time

import numpy as np

from dirpoly import _purekernels
from dirpoly.arith import sieve_primes
from dirpoly.dirichlet import build_poly, to_torus
from dirpoly.estimate import draw_noise
from dirpoly.weights import WeightSpec

try:
    from dirpoly import _kernels
except ImportError:
    _kernels = None


class _Draw:
    def __init__(self, values):
        self.kind, self.seed, self.values = "rademacher", 0, values


def _best_of(fn, repeats=3):
    best, out = math.inf, None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=1024, help="polynomial length N")
    ap.add_argument("--grid", type=int, default=500_000,
                    help="line-scan grid points")
    ap.add_argument("--batch", type=int, default=50_000,
                    help="random torus points for the batch max")
    ap.add_argument("--budget", type=int, default=5_000,
                    help="coordinate-ascent evaluation budget")
    ap.add_argument("--seed", type=int, default=20260813)
    args = ap.parse_args()

    if _kernels is None:
        raise SystemExit("compiled backend unavailable; nothing to compare")

    table = sieve_primes(max(args.n, 100))
    tau = table.pi_of(args.n)
    eps = draw_noise("rademacher", args.seed, args.n).values
    poly = build_poly(args.n, 0.25, WeightSpec.divisor(), _Draw(eps), table)
    tp = to_torus(poly, tau, table)
    logn = np.log(poly.n_values.astype(np.float64))
    amps = poly.line_amplitudes
    rng = np.random.default_rng(args.seed)
    zb = rng.random((args.batch, tau))
    z0 = np.zeros(tau)

    jobs = [
        ("line_scan_max",
         lambda impl: impl.line_scan_max(amps, logn, 0.0, 1e-2, args.grid)),
        ("torus_batch_max",
         lambda impl: impl.torus_batch_max(tp.amps, tp.indptr, tp.cols,
                                           tp.exps, zb)),
        ("coordinate_ascent",
         lambda impl: impl.coordinate_ascent(tp.amps, tp.indptr, tp.cols,
                                             tp.exps, z0, args.budget,
                                             64, 16)),
    ]

    print("workload: N=%d tau=%d nnz=%d grid=%d batch=%d budget=%d"
          % (args.n, tau, tp.cols.size, args.grid, args.batch, args.budget))
    print("%-18s %12s %12s %9s  %s"
          % ("kernel", "compiled [s]", "pure [s]", "speedup", "agreement"))
    for name, job in jobs:
        tc, outc = _best_of(lambda: job(_kernels))
        tp_, outp = _best_of(lambda: job(_purekernels))
        vc, vp = float(outc[0]), float(outp[0])
        rel = abs(vc - vp) / max(1.0, abs(vc))
        agree = "value rel diff %.1e" % rel
        if name == "coordinate_ascent":
            agree += ", evals %d/%d" % (outc[2], outp[2])
        elif outc[1] == outp[1]:
            agree += ", same argmax"
        print("%-18s %12.3f %12.3f %8.1fx  %s" % (name, tc, tp_, tp_ / tc, agree))


if __name__ == "__main__":
    main()
