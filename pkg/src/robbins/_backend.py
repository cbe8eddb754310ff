"""Pick the compiled kernels if they import, else the numpy twin.

Set ``ROBBINS_BACKEND=python`` to force the fallback.
"""

import os

from . import _kernels_py

try:
    if os.environ.get("ROBBINS_BACKEND", "").lower() == "python":
        raise ImportError("fallback requested")
    from . import _kernels as compiled
except ImportError:
    compiled = None

python = _kernels_py
DEFAULT = "compiled" if compiled is not None else "python"


def resolve(name=None):
    """Return ``(name, module)`` for 'compiled', 'python' or None (default)."""
    name = name or DEFAULT
    if name == "compiled":
        if compiled is None:
            raise RuntimeError("compiled kernels are not available")
        return name, compiled
    if name == "python":
        return name, python
    raise ValueError(f"unknown backend {name!r}")
