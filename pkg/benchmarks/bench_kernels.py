#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-numpy fallback.

Run:  python benchmarks/bench_kernels.py
"""

import time

import numpy as np

from cubiclab._kernels import BACKEND, get_impl
from cubiclab.eisenstein import cubic_symbol, split_prime
from cubiclab.family import _primitive_root
from cubiclab.montecarlo import _law_arrays3


def timeit(fn, *args, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    impls = {}
    for name in ("native", "python"):
        try:
            impls[name] = get_impl(name)
        except ImportError:
            print(f"[{name} backend unavailable]")
    print(f"active backend: {BACKEND}\n")
    rows = []

    # segmented sieve to 1e7
    for name, impl in impls.items():
        rows.append((f"sieve 1e7 [{name}]", timeit(impl.sieve_range, 2, 10**7)))

    # cubic symbol table for a ~1e5 conductor
    q = 100003
    pp = split_prime(q)
    g = _primitive_root(q)
    kg = cubic_symbol(g, pp).k
    T = np.zeros(q, dtype=np.uint8)
    ref = {}
    for name, impl in impls.items():
        rows.append((f"symbol table q=1e5 [{name}]",
                     timeit(impl.fill_symbol_table, q, g, kg, T)))
        ref[name] = T.copy()

    # truncated-series sweep, N = 1e6, prime conductor
    N = 10**6
    inv = 1.0 / np.arange(1, N + 1)
    qs = np.array([q], dtype=np.int64)
    offs = np.array([0, q], dtype=np.int64)
    M = np.arange(4, dtype=np.uint8).reshape(1, 4)
    sweep_out = {}
    for name, impl in impls.items():
        def run(impl=impl):
            rstate = np.zeros(1, dtype=np.int64)
            acc = np.zeros((1, 4))
            impl.sweep_chars(qs, ref[name], offs, M, 1, N + 1, rstate, inv, acc)
            return acc
        rows.append((f"L-series sweep N=1e6 [{name}]", timeit(run)))
        sweep_out[name] = run()

    # Monte Carlo draws at y = 1e4
    _, t0a, t1a, c1a, cwa = _law_arrays3(10**4)
    out = np.empty(2 * 10**5)
    for name, impl in impls.items():
        rows.append((f"mc 2e5 draws y=1e4 [{name}]",
                     timeit(impl.mc_logabs3, 2024, 0, len(out), t0a, t1a, c1a, cwa, out)))

    width = max(len(r[0]) for r in rows)
    for label, dt in rows:
        print(f"{label:<{width}}  {dt * 1e3:10.2f} ms")

    if len(impls) == 2:
        agree = np.allclose(sweep_out["native"], sweep_out["python"], rtol=1e-13)
        print(f"\nbackends agree on the sweep: {agree}")


if __name__ == "__main__":
    main()
