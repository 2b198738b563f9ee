"""Backend selection for the hot loops.

The compiled extension is used when it was built; otherwise, or when
``GAUSSRADON_PURE_PYTHON`` is set, the NumPy versions are used. Both
expose the same functions.
"""

import importlib
import os

from . import _kernels_py


def load_backend(name):
    if name == "python":
        return _kernels_py
    if name == "cython":
        return importlib.import_module("gaussradon._ckernels")
    raise ValueError(f"unknown kernel backend {name!r}")


def _select():
    if os.environ.get("GAUSSRADON_PURE_PYTHON"):
        return "python", _kernels_py
    try:
        return "cython", load_backend("cython")
    except ImportError:
        return "python", _kernels_py


BACKEND, _impl = _select()

schauder_synthesize = _impl.schauder_synthesize
schauder_analyze = _impl.schauder_analyze
schauder_sup = _impl.schauder_sup
row_sup_abs = _impl.row_sup_abs
weighted_sq_norm = _impl.weighted_sq_norm
