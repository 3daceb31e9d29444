"""Optional numba acceleration.

Kernels are written once and compiled with numba when it is importable and
``AHS_DISABLE_JIT`` is unset. With the flag set (``1``, ``true``, ``yes``),
every kernel runs through its pure-numpy twin instead.
"""

import os

JIT_ENABLED = os.environ.get("AHS_DISABLE_JIT", "").strip().lower() not in ("1", "true", "yes")

if JIT_ENABLED:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        JIT_ENABLED = False

if not JIT_ENABLED:

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(fn):
            return fn

        return wrap
