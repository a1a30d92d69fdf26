"""Pick the compiled nodal kernels when available, else the numpy fallback.

Set ``RGFLOW_KERNELS=python`` to force the fallback (used by the benchmark
and the cross-backend tests).
"""

from __future__ import annotations

import os

from . import _kernels_py

kernels = _kernels_py
NAME = "python"

if os.environ.get("RGFLOW_KERNELS", "").lower() != "python":
    try:
        from . import _kernels as _compiled
    except ImportError:
        pass
    else:
        kernels = _compiled
        NAME = "cython"

python_kernels = _kernels_py


def compiled_kernels():
    """The compiled module, or None when the extension was not built."""
    try:
        from . import _kernels as mod
    except ImportError:
        return None
    return mod
