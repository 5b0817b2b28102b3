"""Pick the compiled kernels when they were built, else the numpy ones.

Set ``INFUSEDLASSO_BACKEND=python`` to force the fallback.
"""

import os

from . import _kernels_py

kernels = _kernels_py
COMPILED = False

if os.environ.get("INFUSEDLASSO_BACKEND", "auto").lower() != "python":
    try:
        from . import _kernels as kernels  # noqa: F811
        COMPILED = True
    except ImportError:
        kernels = _kernels_py

BACKEND = "cython" if COMPILED else "python"
