"""Select the compiled kernels when importable, else the pure-Python ones.

Set ``INFCONV_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _fallback

if os.environ.get("INFCONV_PURE_PYTHON") == "1":
    _compiled = None
else:
    try:
        from . import _kernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKENDS = {"python": _fallback}
if _compiled is not None:
    BACKENDS["compiled"] = _compiled

NAME = "compiled" if _compiled is not None else "python"
kernels = BACKENDS[NAME]


def get(name=None):
    """Kernel module by name (``"compiled"`` or ``"python"``); default is the active one."""
    if name is None:
        return kernels
    try:
        return BACKENDS[name]
    except KeyError:
        raise ValueError(f"kernel backend {name!r} is not available") from None
