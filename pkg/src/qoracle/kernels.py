"""Kernel backend selection.

The compiled Cython module is used when it was built; otherwise the numpy
fallback is loaded. Setting ``QORACLE_PURE_PYTHON=1`` forces the fallback.
"""

import importlib
import os

_NAMES = {"native": "qoracle._native", "python": "qoracle._fallback"}


def load_backend(name: str):
    """Import a kernel backend by name (``native`` or ``python``)."""
    return importlib.import_module(_NAMES[name])


def _select():
    if os.environ.get("QORACLE_PURE_PYTHON", "").strip() not in ("", "0"):
        return "python", load_backend("python")
    try:
        return "native", load_backend("native")
    except ImportError:
        return "python", load_backend("python")


BACKEND, _impl = _select()

apply_h = _impl.apply_h
apply_x = _impl.apply_x
apply_rz = _impl.apply_rz
apply_cx = _impl.apply_cx
apply_mcx = _impl.apply_mcx
apply_mcz = _impl.apply_mcz
apply_diagonal = _impl.apply_diagonal
fwht_inplace = _impl.fwht
marginal = _impl.marginal
