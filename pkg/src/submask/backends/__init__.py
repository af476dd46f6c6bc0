"""Kernel backends for the Q-network math.

Two interchangeable implementations of the same three kernels (single
forward, batched forward, fused gradient step): a compiled Cython extension
and a NumPy fallback.  The compiled one is preferred when importable; set
SUBMASK_BACKEND=numpy or =native to force a choice.

Both backends are deterministic, but they sum dot products in different
orders, so results can differ at the few-ulp level; training runs are
reproducible per backend, not across backends.
"""

import os

from . import numpy_backend

try:
    from . import _native
except ImportError:
    _native = None


def available_backends():
    names = ["numpy"]
    if _native is not None:
        names.insert(0, "native")
    return names


def get_backend(name: str):
    if name == "numpy":
        return numpy_backend
    if name == "native":
        if _native is None:
            raise RuntimeError("compiled backend not built; reinstall with a C compiler")
        return _native
    raise ValueError(f"unknown backend {name!r}")


def default_backend():
    forced = os.environ.get("SUBMASK_BACKEND")
    if forced:
        return get_backend(forced)
    return _native if _native is not None else numpy_backend
