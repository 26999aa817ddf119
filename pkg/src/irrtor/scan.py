"""Block scanner backend selection.

The compiled ``_scan`` extension is used when it was built; set
``IRRTOR_PURE_PYTHON=1`` to force the pure-Python implementation.
"""

import os

from . import _scan_py

split_blocks = _scan_py.split_blocks
parse_chunk = None  # compiled scan-and-build kernel, when available
BACKEND = "python"

if not os.environ.get("IRRTOR_PURE_PYTHON"):
    try:
        from ._scan import parse_chunk, split_blocks  # type: ignore[import-not-found]

        BACKEND = "cython"
    except ImportError:
        pass

__all__ = ["split_blocks", "parse_chunk", "BACKEND"]
