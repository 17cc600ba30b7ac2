"""Backend selection for the adaptive ODE kernels.

The compiled extension is preferred; the pure-Python module is used when the
extension is unavailable or when ``BOUSSINESQ_LAB_BACKEND=python`` is set.
"""
import importlib
import os

__all__ = ["impl", "BACKEND", "load", "available"]

_NAMES = {"cython": "._kernels", "python": "._kernels_py"}


def load(name=None):
    """Return the kernel module for ``name`` in {None, "cython", "python"}."""
    if name is None:
        return impl
    if name not in _NAMES:
        raise ValueError(f"unknown kernel backend {name!r}")
    return importlib.import_module(_NAMES[name], __package__)


def available():
    out = ["python"]
    try:
        load("cython")
    except ImportError:
        pass
    else:
        out.insert(0, "cython")
    return out


def _select():
    choice = os.environ.get("BOUSSINESQ_LAB_BACKEND", "auto").lower()
    if choice == "python":
        return load("python")
    try:
        return load("cython")
    except ImportError:
        if choice == "cython":
            raise
        return load("python")


impl = _select()
BACKEND = impl.BACKEND
