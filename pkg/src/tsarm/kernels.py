"""Backend selection for the loess/STL hot loops.

The compiled ``_kernels`` extension is used when it imports; otherwise the
numpy twin in ``_kernels_py`` takes over. Set ``TSARM_PURE_PYTHON=1`` to
force the fallback.
"""

import os

from . import _kernels_py

if os.environ.get("TSARM_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        _impl = _kernels_py
        BACKEND = "python"

loess_at = _impl.loess_at
loess_grid = _impl.loess_grid
stl_inner = _impl.stl_inner

__all__ = ["BACKEND", "loess_at", "loess_grid", "stl_inner"]
