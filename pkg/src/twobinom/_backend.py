"""Numba/numpy backend selection.

The hot kernels in ``_kernels`` ship in two functionally identical flavors:
a numba ``@njit`` implementation and a pure-numpy one.  Selection happens
once at import time from the environment:

``TWOBINOM_BACKEND``
    ``auto`` (default) uses numba when importable, ``numba`` requires it,
    ``numpy`` forces the fallback.
``TWOBINOM_THREADS``
    Caps the numba threading layer used by parallel kernels.
"""

from __future__ import annotations

import os

_choice = os.environ.get("TWOBINOM_BACKEND", "auto").strip().lower()
if _choice not in ("auto", "numba", "numpy"):
    raise ValueError(
        f"TWOBINOM_BACKEND must be one of auto|numba|numpy, got {_choice!r}"
    )

_have_numba = False
if _choice != "numpy":
    try:
        import numba  # noqa: F401

        _have_numba = True
    except ImportError:
        if _choice == "numba":
            raise ImportError(
                "TWOBINOM_BACKEND=numba but numba is not importable"
            ) from None

NUMBA_ENABLED: bool = _have_numba

if NUMBA_ENABLED:
    from numba import njit, prange

    _threads = os.environ.get("TWOBINOM_THREADS", "").strip()
    if _threads:
        import numba as _nb

        _nb.set_num_threads(max(1, min(int(_threads), _nb.config.NUMBA_NUM_THREADS)))
else:  # pragma: no cover - exercised via TWOBINOM_BACKEND=numpy subprocess tests
    njit = None
    prange = range


def backend_name() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"
