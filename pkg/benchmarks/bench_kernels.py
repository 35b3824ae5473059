#!/usr/bin/env python3
"""Benchmark the jitted kernels against the pure-numpy fallbacks.

Times the direct Fourier sum and the gate-level transform on inputs shaped
like real pipeline states (sparse support) and like the cross-check states
(full support). Run after `pip install -e .`:

    python3 benchmarks/bench_kernels.py --q 2048 --repeats 5

The numba path must be importable for a meaningful comparison; if numba is
unavailable both columns time the same numpy implementation.
"""

import argparse
import time

import numpy as np

from shorsim import _kernels


def time_call(fn, *args, repeats):
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - started)
    return best


def random_amps(size, seed):
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=size) + 1j * rng.normal(size=size)
    return (amps / np.linalg.norm(amps)).astype(np.complex128)


def bench_direct(q, support_fraction, repeats):
    rng = np.random.default_rng(0)
    m = max(1, int(q * support_fraction))
    support = np.sort(rng.choice(q, size=m, replace=False)).astype(np.int64)
    amps = random_amps(m, seed=1)
    # warm both paths (JIT compile, table cache)
    _kernels.dft_support_numba(support, amps, q)
    _kernels.dft_support_numpy(support, amps, q)
    t_numba = time_call(_kernels.dft_support_numba, support, amps, q, repeats=repeats)
    t_numpy = time_call(_kernels.dft_support_numpy, support, amps, q, repeats=repeats)
    return t_numba, t_numpy


def bench_gates(s, right, repeats):
    q = 1 << s
    base = random_amps(q * right, seed=2).reshape(q, right)
    _kernels.qft_gates_numba(base.copy(), s)
    _kernels.qft_gates_numpy(base.copy(), s)
    t_numba = time_call(lambda: _kernels.qft_gates_numba(base.copy(), s), repeats=repeats)
    t_numpy = time_call(lambda: _kernels.qft_gates_numpy(base.copy(), s), repeats=repeats)
    return t_numba, t_numpy


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--q", type=int, default=2048, help="control dimension")
    parser.add_argument("--right", type=int, default=64, help="function dimension")
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()
    s = int(np.log2(args.q))
    if 1 << s != args.q:
        parser.error("--q must be a power of two")

    print(f"active backend: {_kernels.active_backend()}")
    print(f"{'kernel':<38}{'numba':>12}{'numpy':>12}{'speedup':>10}")
    for label, frac in [("direct sum, sparse support (q/8)", 1 / 8),
                        ("direct sum, full support", 1.0)]:
        t_nb, t_np = bench_direct(args.q, frac, args.repeats)
        print(f"{label:<38}{t_nb * 1e3:>10.2f}ms{t_np * 1e3:>10.2f}ms{t_np / t_nb:>9.1f}x")
    t_nb, t_np = bench_gates(s, args.right, args.repeats)
    label = f"gate transform (s={s}, right={args.right})"
    print(f"{label:<38}{t_nb * 1e3:>10.2f}ms{t_np * 1e3:>10.2f}ms{t_np / t_nb:>9.1f}x")


if __name__ == "__main__":
    main()
