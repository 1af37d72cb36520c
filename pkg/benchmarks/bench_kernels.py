#!/usr/bin/env python3
"""Benchmark the numba kernels against their pure-numpy fallbacks.

Runs each hot kernel (Jakes fading evaluation, RB-pair allocation) on
engine-representative sizes, checks both implementations agree, and
prints the timing ratio. Works regardless of the HETNETSIM_NUMBA env
flag because it compiles the loop kernels explicitly.

    python3 benchmarks/bench_kernels.py
"""

import time

import numpy as np

from hetnetsim.accel import jit_compile
from hetnetsim.fading import JakesFading, _jakes_power_loop, _jakes_power_numpy
from hetnetsim.scheduler import _allocate_loop, _allocate_numpy


def timeit(fn, args, repeats=200):
    fn(*args)  # warm-up / JIT compile
    best = float("inf")
    for _ in range(5):
        start = time.perf_counter()
        for _ in range(repeats):
            fn(*args)
        best = min(best, (time.perf_counter() - start) / repeats)
    return best


def bench_jakes():
    print("== Jakes fading gains (70 UEs x 50 RBs x 8 oscillators, ~30% active) ==")
    jf = JakesFading(seed=1, domain=3, n_ues=70, n_rbs=50, doppler_hz=5.56)
    rng = np.random.default_rng(0)
    idx = np.sort(rng.choice(70 * 50, size=70 * 50 // 3, replace=False))
    args = (jf._freq_i, jf._freq_q, jf._phase_i, jf._phase_q, 0.5, idx)
    jitted = jit_compile(_jakes_power_loop)
    got_numpy = _jakes_power_numpy(*args)
    results = {"numpy": timeit(_jakes_power_numpy, args)}
    if jitted is not None:
        np.testing.assert_allclose(jitted(*args), got_numpy, rtol=0, atol=1e-9)
        results["numba"] = timeit(jitted, args)
    report(results)


def bench_allocation():
    print("== RB-pair allocation (140 flows x 50 RB-pairs) ==")
    rng = np.random.default_rng(2)
    scalars = rng.random(140)
    rates = rng.integers(0, 757, size=(140, 50)).astype(np.int64)
    queues = rng.integers(0, 30_000, size=140).astype(np.int64)
    args = (scalars, rates, queues)
    jitted = jit_compile(_allocate_loop)
    g_np, s_np = _allocate_numpy(*args)
    results = {"numpy": timeit(_allocate_numpy, args)}
    if jitted is not None:
        g_nb, s_nb = jitted(*args)
        assert g_np.tolist() == g_nb.tolist()
        assert s_np.tolist() == s_nb.tolist()
        results["numba"] = timeit(jitted, args)
    report(results)


def report(results):
    for name, seconds in results.items():
        print(f"  {name:>6}: {seconds * 1e6:9.1f} us/call")
    if "numba" in results:
        print(f"  speedup: {results['numpy'] / results['numba']:.1f}x")
    else:
        print("  numba unavailable; fallback only")
    print()


if __name__ == "__main__":
    bench_jakes()
    bench_allocation()
