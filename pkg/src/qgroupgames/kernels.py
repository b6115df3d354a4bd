"""Backend selection for the profile-scanning kernel.

The compiled extension is used when it imports; otherwise the numpy fallback.
Set ``QGROUPGAMES_PURE=1`` to force the fallback.
"""
from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

NOT_FOUND = _kernels_py.NOT_FOUND
FOUND = _kernels_py.FOUND
BUDGET = _kernels_py.BUDGET

if os.environ.get("QGROUPGAMES_PURE"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:  # pragma: no cover - depends on build
        _impl = _kernels_py
        BACKEND = "python"


def scan(owner_set, owner_idx, opp_set, slots, start, target, want_win,
         tol, budget, projector=None, inv_tol=1e-8, impl=None):
    """Dispatch to a backend; ``impl`` is a backend name, a module, or None."""
    if impl is None:
        impl = _impl
    elif isinstance(impl, str):
        found = backends()
        if impl not in found:
            raise ValueError(f"unknown or unavailable backend {impl!r}")
        impl = found[impl]
    return impl.scan(
        np.ascontiguousarray(owner_set, dtype=np.complex128),
        np.ascontiguousarray(owner_idx, dtype=np.intp),
        np.ascontiguousarray(opp_set, dtype=np.complex128),
        np.ascontiguousarray(slots, dtype=np.intp),
        np.ascontiguousarray(start, dtype=np.complex128),
        int(target), bool(want_win), float(tol), int(budget),
        projector, float(inv_tol),
    )


def backends() -> dict:
    """All importable backends by name."""
    out = {"python": _kernels_py}
    try:
        from . import _kernels  # type: ignore[attr-defined]
        out["cython"] = _kernels
    except ImportError:  # pragma: no cover
        pass
    return out
