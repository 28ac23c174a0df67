"""Compiled-vs-fallback timing for the orbit kernels.

Usage: python benchmarks/bench_kernels.py [n_orbit]

The hot loops are strictly sequential (each iterate feeds the next), so
the speedup here is the whole argument for carrying the compiled
extension.  Results also cross-check the two implementations bit for
bit on the same inputs.
"""

import sys
import time

import numpy as np

from circren import kernels
from circren import _kernels_py as pure
from circren.families import TrigParams, trig_lift
from circren.pairs import extract_pair


def timed(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return out, best


def bench_orbit(lift, n):
    args = (lift.omega_fourier, lift.A, lift.B, 0.1, n)
    out_c = np.empty(n)
    out_p = np.empty(n)
    (_, tc) = timed(kernels.orbit_fill, *args[:4], n, out_c)
    (_, tp) = timed(pure.orbit_fill, *args[:4], n, out_p)
    assert np.array_equal(out_c, out_p), "orbit_fill implementations differ"
    return tc, tp


def bench_delta_count(lift, n):
    args = (lift.omega_fourier, lift.A, lift.B, 0.45, 0.1, n)
    rc, tc = timed(kernels.orbit_delta_count, *args)
    rp, tp = timed(pure.orbit_delta_count, *args)
    assert rc == rp, "orbit_delta_count implementations differ"
    return tc, tp


def bench_chain_eval(pair, n):
    pieces = list(pair.eta.pieces)
    coeffs, lens, los, his = kernels.flatten_pieces(pieces)
    types = np.array(
        [0 if hasattr(s, "coeffs") else 1 for s in pair.eta.stages],
        dtype=np.int64)
    xs = np.linspace(pair.eta.domain.lo, pair.eta.domain.hi, 201)

    def sweep(impl):
        acc = 0.0
        for _ in range(n // 201):
            for x in xs:
                v, _ = impl(types, coeffs, lens, los, his, float(x))
                acc += v
        return acc

    rc, tc = timed(sweep, kernels.chain_eval_scalar, repeat=1)
    rp, tp = timed(sweep, pure.chain_eval_scalar, repeat=1)
    assert abs(rc - rp) < 1e-9 * max(1.0, abs(rc)), \
        "chain_eval_scalar implementations differ"
    return tc, tp


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 200000
    lift = trig_lift(TrigParams(omega=0.6841353647950825,
                                c=0.45186614990234375,
                                beta=0.0, phase=0.0))
    pair = extract_pair(lift, 2)

    print("active implementation: %s" % kernels.IMPL)
    print("n = %d iterations per kernel" % n)
    print()
    print("%-22s %12s %12s %9s" % ("kernel", "compiled", "python",
                                   "speedup"))
    for name, fn in (("orbit_fill", bench_orbit),
                     ("orbit_delta_count", bench_delta_count),
                     ("chain_eval_scalar", bench_chain_eval)):
        tc, tp = fn(lift, n) if name != "chain_eval_scalar" \
            else fn(pair, n)
        print("%-22s %10.4f s %10.4f s %8.1fx" % (name, tc, tp,
                                                  tp / tc if tc > 0 else 0))


if __name__ == "__main__":
    main()
