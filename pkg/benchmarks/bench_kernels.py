#!/usr/bin/env python3
"""Benchmark the compiled metric kernel against the NumPy fallback.

Times one differential decode metric scan (the hot loop of both decoders
and of the Monte Carlo simulator) over codebook stacks of increasing
size, plus the per-frame cost of the two decoders through the public
API on the largest codebook.

Run from the repository root:

    python benchmarks/bench_kernels.py [--repeats 9]
"""

import argparse
import statistics
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import numpy as np  # noqa: E402

from gdstbc import _kernels_py  # noqa: E402
from gdstbc._kernels import compiled_available  # noqa: E402
from gdstbc.codebook import Codebook  # noqa: E402
from gdstbc.design import construct_design  # noqa: E402
from gdstbc.diffcodec import decode_exhaustive, decode_group  # noqa: E402
from gdstbc.signalset import construct_signal_set  # noqa: E402


def time_call(fn, args, repeats):
    fn(*args)  # warm up
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        samples.append(time.perf_counter() - t0)
    return statistics.median(samples)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeats", type=int, default=9)
    args = ap.parse_args()

    backends = [("numpy", _kernels_py.metric_scan)]
    if compiled_available():
        from gdstbc import _ckernels

        backends.append(("compiled", _ckernels.metric_scan))
    else:
        print("note: compiled kernel not built; benchmarking the fallback only\n")

    rng = np.random.default_rng(0)
    cases = [(1, 16), (2, 256), (3, 4096), (3, 16**4)]

    print(f"{'case':>16} {'M':>6}", *(f"{name:>12}" for name, _ in backends),
          f"{'speedup':>9}" if len(backends) == 2 else "")
    for lam, m in cases:
        cb = Codebook(construct_design(lam), construct_signal_set(lam, m),
                      check_decodable=False)
        n = cb.n
        stack = cb.matrices
        r_prev = np.ascontiguousarray(
            rng.standard_normal((n, 1)) + 1j * rng.standard_normal((n, 1)))
        r_t = np.ascontiguousarray(
            rng.standard_normal((n, 1)) + 1j * rng.standard_normal((n, 1)))
        times = [time_call(fn, (stack, r_prev, r_t, 1.0), args.repeats)
                 for _, fn in backends]
        for (_, fn), t in zip(backends, times):
            a = fn(stack, r_prev, r_t, 1.0)
            b = backends[0][1](stack, r_prev, r_t, 1.0)
            assert a[0] == b[0], "backends disagree on the argmin"
        row = [f"{f'lam={lam} n={n}':>16} {m:>6}"]
        row += [f"{t * 1e6:>10.1f}us" for t in times]
        if len(times) == 2:
            row.append(f"{times[0] / times[1]:>8.1f}x")
        print(" ".join(row))

    print("\nfull decoder paths on lam=3, M=16^4 (selected backend):")
    cb = Codebook(construct_design(3), construct_signal_set(3, 16**4))
    r_prev = np.ascontiguousarray(
        rng.standard_normal((8, 1)) + 1j * rng.standard_normal((8, 1)))
    r_t = np.ascontiguousarray(
        rng.standard_normal((8, 1)) + 1j * rng.standard_normal((8, 1)))
    t_e = time_call(lambda: decode_exhaustive(cb, r_t, r_prev, 1.0), (), args.repeats)
    t_g = time_call(lambda: decode_group(cb, r_t, r_prev, 1.0), (), 50)
    print(f"  exhaustive (65536 evals): {t_e * 1e3:8.2f} ms/frame")
    print(f"  group      (   64 evals): {t_g * 1e6:8.1f} us/frame "
          f"({t_e / t_g:.0f}x faster)")


if __name__ == "__main__":
    main()
