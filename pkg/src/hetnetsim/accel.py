"""Selects between numba-jitted and pure-numpy kernel implementations.

The hot inner loops (Jakes fading evaluation, per-TTI resource block
allocation) have two interchangeable implementations. By default the
numba build is used when numba imports cleanly; set HETNETSIM_NUMBA=0
(or NUMBA_DISABLE_JIT=1) to force the numpy fallback. Both paths are
exercised by benchmarks/bench_kernels.py.
"""

import os


def _env_flag(name: str, default: bool) -> bool:
    raw = os.getenv(name)
    if raw is None:
        return default
    return raw.strip().lower() not in ("0", "false", "no", "off")


NUMBA_ENABLED = _env_flag("HETNETSIM_NUMBA", True)
if os.getenv("NUMBA_DISABLE_JIT", "0").strip() == "1":
    NUMBA_ENABLED = False

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None
    NUMBA_ENABLED = False


def jit_compile(loop_impl):
    """Return the njit-compiled version of a loop kernel, or None if numba is unavailable."""
    if njit is None:
        return None
    return njit(cache=True)(loop_impl)


def select_kernel(loop_impl, numpy_impl):
    """Pick the active implementation for a kernel pair."""
    if NUMBA_ENABLED:
        compiled = jit_compile(loop_impl)
        if compiled is not None:
            return compiled
    return numpy_impl
