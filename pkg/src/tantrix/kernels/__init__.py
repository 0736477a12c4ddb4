"""Stepping kernels.

The compiled extension is used when it built successfully; otherwise the
numpy reference implementation takes over.  Set TANTRIX_NO_EXT=1 to force
the reference path (the equivalence tests do this to compare the two).
"""

import os

from . import _ref

if os.environ.get("TANTRIX_NO_EXT"):
    _impl = _ref
else:
    try:
        from . import _speed as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _ref

csf_advance = _impl.csf_advance
BACKEND = "compiled" if _impl is not _ref else "reference"

__all__ = ["csf_advance", "BACKEND"]
