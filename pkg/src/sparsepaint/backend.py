"""Kernel backend selection.

The hot numeric loops (stencils, CG, Jacobi sweeps, error diffusion) exist
twice: a numba ``@njit`` version and a pure-numpy fallback.  The backend is
picked once per process from the environment:

    SPARSEPAINT_BACKEND=auto    use numba when importable (default)
    SPARSEPAINT_BACKEND=numba   require numba, fail loudly if missing
    SPARSEPAINT_BACKEND=numpy   force the pure-numpy fallback

``set_backend()`` overrides the choice at runtime (used by tests and the
backend benchmark).
"""

from __future__ import annotations

import os

_VALID = ("auto", "numba", "numpy")
_choice = os.environ.get("SPARSEPAINT_BACKEND", "auto").lower()
if _choice not in _VALID:
    raise RuntimeError(
        f"SPARSEPAINT_BACKEND must be one of {_VALID}, got {_choice!r}"
    )

_kernels = None


def set_backend(name: str) -> None:
    """Force a backend ('numba' or 'numpy'); 'auto' restores default probing."""
    global _choice, _kernels
    if name not in _VALID:
        raise ValueError(f"backend must be one of {_VALID}, got {name!r}")
    _choice = name
    _kernels = None


def backend_name() -> str:
    get_kernels()
    return _kernels.NAME


def get_kernels():
    """Return the active kernel module (lazy import, cached)."""
    global _kernels
    if _kernels is not None:
        return _kernels
    if _choice == "numpy":
        from . import kernels_numpy as mod
    elif _choice == "numba":
        from . import kernels_numba as mod
    else:
        try:
            from . import kernels_numba as mod
        except ImportError:
            from . import kernels_numpy as mod
    _kernels = mod
    return mod
