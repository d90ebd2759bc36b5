"""Backend selection for the jet kernels.

The Cython extension is used when it was built; otherwise, or when the
environment variable ``BETAFINSLER_PURE_PYTHON`` is set, the numpy
fallback is used.  Both expose ``mul`` and ``compose`` with identical
signatures.
"""
import os

from . import _pykernels

if os.environ.get("BETAFINSLER_PURE_PYTHON"):
    _backend = None
else:
    try:
        from . import _ckernels as _backend
    except ImportError:  # extension not built
        _backend = None

if _backend is None:
    BACKEND = "python"
    mul = _pykernels.mul
    compose = _pykernels.compose
else:
    BACKEND = "cython"
    mul = _backend.mul
    compose = _backend.compose
