"""Kernel backend selection.

The compiled extension is preferred; the numpy implementation is the fallback.
Set CUBICLAB_KERNELS=python (or =native) to force a backend.
"""

import os

_forced = os.environ.get("CUBICLAB_KERNELS", "").strip().lower()
if _forced not in {"", "native", "python"}:
    raise RuntimeError(f"CUBICLAB_KERNELS must be 'native' or 'python', got {_forced!r}")

_impl = None
if _forced in {"", "native"}:
    try:
        from . import _native as _impl
    except ImportError:
        if _forced == "native":
            raise
if _impl is None:
    from . import _numpy as _impl

BACKEND = "native" if _impl.IS_NATIVE else "python"

sieve_range = _impl.sieve_range
fill_symbol_table = _impl.fill_symbol_table
sweep_chars = _impl.sweep_chars
mc_uniforms = _impl.mc_uniforms
mc_logabs3 = _impl.mc_logabs3


def get_impl(name):
    """Fetch a named backend explicitly (used by the kernel benchmark/tests)."""
    if name == "native":
        from . import _native

        return _native
    if name == "python":
        from . import _numpy

        return _numpy
    raise ValueError(f"unknown backend {name!r}")
