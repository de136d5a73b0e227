"""Hot kernels: the compiled extension when available, numpy otherwise.

Set ``NHQFI_KERNELS=python`` to force the numpy fallback.
"""
from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels
if os.environ.get("NHQFI_KERNELS", "").lower() != "python":
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
        BACKEND = "cython"
    except ImportError:
        pass

generator_qfi_grid = _impl.generator_qfi_grid

__all__ = ["BACKEND", "generator_qfi_grid"]
