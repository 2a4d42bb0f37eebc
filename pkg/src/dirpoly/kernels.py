"""Kernel backend selection.

The compiled Cython kernels are used when the extension built successfully;
otherwise the NumPy fallback takes over.  Setting the environment variable
``DIRPOLY_PURE=1`` before import forces the fallback (useful for timing
comparisons and for debugging).

Within one backend every kernel is deterministic.  Across backends the
evaluation counts and search trajectories agree, but float round-off may
differ at machine-precision level because the reductions associate
differently.
"""

from __future__ import annotations

import os

from . import _purekernels

if os.environ.get("DIRPOLY_PURE") == "1":
    _impl = _purekernels
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:  # pragma: no cover - depends on the build
        _impl = _purekernels

torus_eval = _impl.torus_eval
torus_batch_max = _impl.torus_batch_max
line_scan_max = _impl.line_scan_max
coordinate_ascent = _impl.coordinate_ascent


def backend_name() -> str:
    """Either ``"compiled"`` or ``"pure"``."""
    return _impl.BACKEND
