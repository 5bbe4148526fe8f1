"""Kernel backend selection.

Prefers the compiled extension, falls back to the pure-Python mirror when it
is missing, and honors ``SIMONLAB_PURE=1`` for forcing the fallback (used by
the backend-equivalence tests and the benchmark script).
"""

from __future__ import annotations

import os

_force_pure = os.environ.get("SIMONLAB_PURE", "").strip() not in ("", "0")

if _force_pure:
    from . import _kernels_py as _impl

    BACKEND = "pure"
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        from . import _kernels_py as _impl  # type: ignore[no-redef]

        BACKEND = "pure"

energy_table = _impl.energy_table
metropolis_run = _impl.metropolis_run


def backend() -> str:
    """Name of the active kernel backend: 'compiled' or 'pure'."""
    return BACKEND
