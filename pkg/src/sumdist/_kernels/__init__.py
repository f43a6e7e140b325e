"""Convolution kernels with a compiled fast path.

``BACKEND`` names the implementation chosen at import: ``"cython"`` when
the extension module was built, ``"python"`` otherwise.
"""
from . import _pykernel

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None

BACKEND = "cython" if _ckernel is not None else "python"

direct_dense = (_ckernel or _pykernel).direct_dense
direct_sparse = _pykernel.direct_sparse


def backend_module(name):
    """Kernel module for ``name`` (``"cython"`` or ``"python"``)."""
    if name == "python":
        return _pykernel
    if name == "cython":
        if _ckernel is None:
            raise ImportError("compiled kernel extension is not built")
        return _ckernel
    raise ValueError(f"unknown kernel backend {name!r}")


def available_backends():
    return ["python"] + (["cython"] if _ckernel is not None else [])
