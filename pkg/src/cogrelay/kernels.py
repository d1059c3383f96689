"""Kernel selection: the compiled extension when importable, numpy otherwise.

Set ``COGRELAY_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _kernels_py

BACKEND = "python"
_impl = _kernels_py

if os.environ.get("COGRELAY_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled  # type: ignore[attr-defined]
    except ImportError:
        pass
    else:
        _impl = _compiled
        BACKEND = "cython"

canonical_gamma2 = _impl.canonical_gamma2
phi_curve = _impl.phi_curve
oracle_grid = _impl.oracle_grid
AF_MARGIN = _kernels_py.AF_MARGIN

__all__ = ["BACKEND", "AF_MARGIN", "canonical_gamma2", "phi_curve", "oracle_grid"]
