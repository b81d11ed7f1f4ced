"""Kernel backend selection.

The compiled extension removes the per-step interpreter and dispatch
overhead, which dominates long iterations at small dimension; above
``CUTOVER_DIM`` the BLAS-backed numpy path is faster, so calls dispatch
on the working dimension. All entry points use the same rule, keeping
recomputation of a step bit-identical to the iterated run.

Set ``QVOLTERRA_PURE_PYTHON=1`` to force the numpy implementation
everywhere (the benchmark uses this to compare the two).
"""

from __future__ import annotations

import os

from . import _kernels_py

CUTOVER_DIM = 128

_compiled = None
if not os.environ.get("QVOLTERRA_PURE_PYTHON"):
    try:
        from . import _kernels_c as _compiled  # type: ignore[no-redef]
    except ImportError:
        _compiled = None

BACKEND: str = "python" if _compiled is None else f"cython (<= dim {CUTOVER_DIM})"


def _impl_for(dim: int):
    if _compiled is not None and dim <= CUTOVER_DIM:
        return _compiled
    return _kernels_py


def volterra_step(a, w):
    return _impl_for(w.shape[0]).volterra_step(a, w)


def conjugate_step(a, wx, wy):
    return _impl_for(wx.shape[0]).conjugate_step(a, wx, wy)


def volterra_iterate(a, w0, steps, stride=1):
    return _impl_for(w0.shape[0]).volterra_iterate(a, w0, steps, stride)


def batch_volterra(a, xs):
    return _impl_for(xs.shape[1]).batch_volterra(a, xs)
