"""Hot-loop kernel selection.

The bounded-variable simplex loop is available both as a Cython extension
(`_simplex`) and as a pure-numpy twin (`simplex_py`). The compiled kernel
is preferred when importable; set DCFED_FORCE_PY=1 to force the fallback.
Both implement the same pivot rules, so results agree to solver tolerance.
"""

import os

from . import simplex_py

if os.environ.get("DCFED_FORCE_PY"):
    _impl = simplex_py
    BACKEND = "python"
else:
    try:
        from . import _simplex as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        _impl = simplex_py
        BACKEND = "python"

simplex_kernel = _impl.simplex_kernel

# Kernel status codes shared by both implementations.
OPTIMAL = 0
INFEASIBLE = 1
UNBOUNDED = 2
ITER_LIMIT = 3


def available_backends():
    names = ["python"]
    try:
        from . import _simplex  # noqa: F401
        names.insert(0, "cython")
    except ImportError:
        pass
    return names


def get_kernel(backend: str):
    if backend == "python":
        return simplex_py.simplex_kernel
    if backend == "cython":
        from . import _simplex
        return _simplex.simplex_kernel
    raise ValueError(f"unknown kernel backend {backend!r}")
