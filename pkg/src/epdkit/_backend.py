"""Select the Bessel kernel backend at import time.

``EPD_BACKEND=python`` forces the numpy kernels, ``EPD_BACKEND=cython``
makes a missing extension an import error; the default prefers the compiled
extension and silently falls back.
"""
import os

from . import _pykernels

_choice = os.environ.get("EPD_BACKEND", "auto").lower()

if _choice == "python":
    kernels = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _kernels as kernels
        BACKEND = "cython"
    except ImportError:
        if _choice == "cython":
            raise
        kernels = _pykernels
        BACKEND = "python"


def available_backends():
    names = {"python": _pykernels}
    try:
        from . import _kernels
    except ImportError:
        pass
    else:
        names["cython"] = _kernels
    return names
