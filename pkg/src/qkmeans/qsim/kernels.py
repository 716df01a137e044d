"""Kernel selection.

The compiled kernels are used when the extension was built; set
``QKMEANS_PURE_PYTHON=1`` to force the numpy implementation.
"""
import os

from . import _pykernels as python

compiled = None
if not os.environ.get("QKMEANS_PURE_PYTHON"):
    try:
        from . import _ckernels as compiled
    except ImportError:  # extension not built
        compiled = None

_impl = compiled if compiled is not None else python

#: Name of the active implementation, ``"cython"`` or ``"numpy"``.
BACKEND = "cython" if compiled is not None else "numpy"

apply_1q = _impl.apply_1q
apply_cswap = _impl.apply_cswap
apply_init = _impl.apply_init
prob_one = _impl.prob_one
swap_overlap = _impl.swap_overlap
