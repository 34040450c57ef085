"""Batched fiberwise kernels with a compiled fast path.

At import time this package selects the Cython extension ``_core`` when it
is available and the environment variable ``TKHODGE_PURE_PYTHON`` is unset;
otherwise the numpy reference backend is used.  The compiled backend only
accepts contiguous float64 input, so the dispatchers below route complex or
odd-layout arrays to the numpy implementations.
"""

import os

import numpy as np

from . import _backend_np

PAIRS = _backend_np.PAIRS
TRIPLES = _backend_np.TRIPLES

_compiled = None
if not os.environ.get("TKHODGE_PURE_PYTHON"):
    try:
        from . import _core as _compiled
    except ImportError:
        _compiled = None

BACKEND = "compiled" if _compiled is not None else "numpy"


def _usable(*arrays):
    if _compiled is None:
        return False
    return all(a.dtype == np.float64 for a in arrays)


def batch_matvec(mats, vecs):
    if _usable(mats, vecs):
        return _compiled.batch_matvec(
            np.ascontiguousarray(mats), np.ascontiguousarray(vecs)
        )
    return _backend_np.batch_matvec(mats, vecs)


def batch_matvec_t(mats, vecs):
    if _usable(mats, vecs):
        return _compiled.batch_matvec_t(
            np.ascontiguousarray(mats), np.ascontiguousarray(vecs)
        )
    return _backend_np.batch_matvec_t(mats, vecs)


def wedge_pair2(a, b):
    if _usable(a, b) and a.ndim == 2 and b.ndim == 2:
        return _compiled.wedge_pair2(
            np.ascontiguousarray(a), np.ascontiguousarray(b)
        )
    return _backend_np.wedge_pair2(a, b)


def weighted_block_dot(w, gram, a, b):
    if _usable(w, gram, a, b):
        return _compiled.weighted_block_dot(
            np.ascontiguousarray(w),
            np.ascontiguousarray(gram),
            np.ascontiguousarray(a),
            np.ascontiguousarray(b),
        )
    return _backend_np.weighted_block_dot(w, gram, a, b)


def compound2(mats):
    if _usable(mats) and mats.ndim == 3:
        return _compiled.compound2(np.ascontiguousarray(mats))
    return _backend_np.compound2(mats)


def compound3(mats):
    if _usable(mats) and mats.ndim == 3:
        return _compiled.compound3(np.ascontiguousarray(mats))
    return _backend_np.compound3(mats)
