#!/usr/bin/env python3
"""Benchmark the jitted kernels against their pure-numpy fallbacks.

Runs every hot kernel through both implementations and reports per-call
times plus the speedup.  The package-level selection is untouched; both
paths are imported explicitly here.

Usage::

    python benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from linoptgates import _kernels
from linoptgates.family import DEGENERACY_EPS, FamilyParams


def timeit(fn, args, repeats):
    fn(*args)  # warm up (and trigger compilation for jitted kernels)
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn(*args)
    return (time.perf_counter() - t0) / repeats


def baseline_pair(jitted_name, numpy_name):
    """(fast, reference) implementation pair, independent of the env flag."""
    fast = getattr(_kernels, jitted_name)
    ref = getattr(_kernels, numpy_name)
    return fast, ref


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=2000)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    rows = []

    # permanent: gray-code kernel vs vectorized inclusion-exclusion
    for n in (4, 6, 8, 10):
        a = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
        reps = max(10, args.repeats // 2 ** max(0, n - 6))
        t_fast = timeit(_kernels.permanent, (a,), reps)
        t_ref = timeit(_kernels._permanent_numpy, (a,), reps)
        rows.append((f"permanent {n}x{n}", t_fast, t_ref))

    v4 = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    fast, ref = baseline_pair("cs_amplitudes", "_cs_amplitudes_impl")
    rows.append(("cs_amplitudes", timeit(fast, (v4,), args.repeats),
                 timeit(ref, (v4,), args.repeats)))

    v3 = np.ascontiguousarray(v4[:3, :3])
    fast, ref = baseline_pair("ns_amplitudes", "_ns_amplitudes_impl")
    rows.append(("ns_amplitudes", timeit(fast, (v3,), args.repeats),
                 timeit(ref, (v3,), args.repeats)))

    params = FamilyParams.random(np.random.default_rng(7), theta=np.pi)
    x = params.to_vector()
    fast, ref = baseline_pair("family_matrix", "_family_matrix_impl")
    rows.append(("family_matrix",
                 timeit(fast, (x, params.phase, 1.0, DEGENERACY_EPS), args.repeats),
                 timeit(ref, (x, params.phase, 1.0, DEGENERACY_EPS), args.repeats)))

    angles = rng.uniform(-np.pi, np.pi, 9)
    fast, ref = baseline_pair("unitary_from_angles", "_unitary_from_angles_impl")
    rows.append(("unitary_from_angles m=3", timeit(fast, (3, angles), args.repeats),
                 timeit(ref, (3, angles), args.repeats)))

    fargs = np.array([1.0, DEGENERACY_EPS, 0.1])
    active = np.arange(14)
    fast, ref = baseline_pair("nelder_mead", "_nelder_mead_impl")
    nm_args = (0, x, active, params.phase, fargs, 400, 1e-13, 1e-11, 0.1)
    reps = max(5, args.repeats // 100)
    rows.append(("nelder_mead 400 iters", timeit(fast, nm_args, reps),
                 timeit(ref, nm_args, reps)))

    mode = "numba" if _kernels.USING_NUMBA else "numpy fallback"
    print(f"active path: {mode}")
    print(f"{'kernel':<24}{'fast':>12}{'numpy ref':>12}{'speedup':>9}")
    for name, t_fast, t_ref in rows:
        print(f"{name:<24}{t_fast * 1e6:>10.1f}us{t_ref * 1e6:>10.1f}us"
              f"{t_ref / t_fast:>8.1f}x")


if __name__ == "__main__":
    main()
