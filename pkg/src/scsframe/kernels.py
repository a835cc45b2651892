"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the pure-Python
module is used. ``SCS_BACKEND=python`` forces the fallback.
"""
import importlib
import os

from . import _pykernels

_FORCE = os.environ.get("SCS_BACKEND", "").strip().lower()

try:
    if _FORCE == "python":
        raise ImportError("python backend forced")
    from . import _ckernels as _impl

    BACKEND = "cython"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"


def available_backends():
    names = ["python"]
    try:
        importlib.import_module("scsframe._ckernels")
        names.insert(0, "cython")
    except ImportError:
        pass
    return names


def get_backend(name=None):
    """Return a kernel module by name ('cython' or 'python'); default is the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "cython":
        return importlib.import_module("scsframe._ckernels")
    raise ValueError(f"unknown backend {name!r}")


sp_search = _impl.sp_search
tsp_search = _impl.tsp_search
spp_search = _impl.spp_search
jaccard_matrix = _impl.jaccard_matrix
floyd_warshall = _impl.floyd_warshall
