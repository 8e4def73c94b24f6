"""Kernel backend selection.

The compiled ``_kernels`` extension is used when it imports; otherwise the
numpy implementation in ``_kernels_py`` takes over. Setting the environment
variable ``GF2TO1_PURE_PYTHON=1`` forces the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

if os.environ.get("GF2TO1_PURE_PYTHON", "") not in ("", "0"):
    kernels = _kernels_py
    NATIVE = False
else:
    try:
        from . import _kernels as kernels  # type: ignore[attr-defined]

        NATIVE = True
    except ImportError:  # pragma: no cover - depends on the build
        kernels = _kernels_py
        NATIVE = False

BACKEND = "cython" if NATIVE else "numpy"


def available_backends() -> dict:
    """Name -> kernel module for every backend importable in this process."""
    out = {"numpy": _kernels_py}
    try:
        from . import _kernels  # type: ignore[attr-defined]

        out["cython"] = _kernels
    except ImportError:  # pragma: no cover
        pass
    return out
