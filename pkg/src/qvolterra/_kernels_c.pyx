# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: quadratic-map application and iteration.

Mirrors the contracts of ``_kernels_py``. The single-step and iterated
paths share one inner-loop structure so that recomputing a recorded step
reproduces it bit for bit.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "cython"


cdef inline void _step(const double[:, ::1] a, const double[::1] w,
                       double[::1] out, Py_ssize_t s) noexcept nogil:
    cdef Py_ssize_t k, i
    cdef double acc
    for k in range(s):
        acc = 1.0
        for i in range(s):
            acc += a[k, i] * w[i]
        out[k] = w[k] * acc


def volterra_step(a, w):
    """One application y_k = w_k * (1 + sum_i a[k, i] * w_i)."""
    cdef const double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] wv = np.ascontiguousarray(w, dtype=np.float64)
    cdef Py_ssize_t s = wv.shape[0]
    out = np.empty(s, dtype=np.float64)
    cdef double[::1] ov = out
    with nogil:
        _step(av, wv, ov, s)
    return out


def conjugate_step(a, wx, wy):
    """Symmetrized bilinear application of the coefficient window."""
    cdef const double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[::1] xv = np.ascontiguousarray(wx, dtype=np.float64)
    cdef const double[::1] yv = np.ascontiguousarray(wy, dtype=np.float64)
    cdef Py_ssize_t s = xv.shape[0]
    out = np.empty(s, dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t k, i
    cdef double ax, ay
    with nogil:
        for k in range(s):
            ax = 1.0
            ay = 1.0
            for i in range(s):
                ax += av[k, i] * yv[i]
                ay += av[k, i] * xv[i]
            ov[k] = 0.5 * (xv[k] * ax + yv[k] * ay)
    return out


def volterra_iterate(a, w0, Py_ssize_t steps, Py_ssize_t stride=1):
    """Iterate the quadratic map, recording thinned snapshots.

    Returns (records, recorded_steps, norms): snapshots at steps
    0, stride, 2*stride, ... plus the final step, and the l1 size of every
    step taken.
    """
    if steps < 1:
        raise ValueError("need steps >= 1")
    if stride < 1:
        raise ValueError("need stride >= 1")
    cdef const double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t s = av.shape[0]
    rec_steps = list(range(0, steps + 1, stride))
    if rec_steps[len(rec_steps) - 1] != steps:
        rec_steps.append(steps)
    rec_arr = np.asarray(rec_steps, dtype=np.int64)
    cdef const cnp.int64_t[::1] rv = rec_arr
    cdef Py_ssize_t nrec = rv.shape[0]

    records = np.empty((nrec, s), dtype=np.float64)
    norms = np.empty(steps, dtype=np.float64)
    cdef double[:, ::1] recv = records
    cdef double[::1] nv = norms

    cur = np.array(w0, dtype=np.float64)
    buf = np.empty(s, dtype=np.float64)
    cdef double[::1] w = cur
    cdef double[::1] y = buf
    cdef Py_ssize_t m, k, nxt = 1
    cdef double diff

    with nogil:
        for k in range(s):
            recv[0, k] = w[k]
        for m in range(1, steps + 1):
            _step(av, w, y, s)
            diff = 0.0
            for k in range(s):
                diff += y[k] - w[k] if y[k] >= w[k] else w[k] - y[k]
                w[k] = y[k]
            nv[m - 1] = diff
            if nxt < nrec and m == rv[nxt]:
                for k in range(s):
                    recv[nxt, k] = w[k]
                nxt += 1
    return records, rec_arr, norms


def batch_volterra(a, xs):
    """Apply the quadratic map to each row of ``xs`` at once."""
    cdef const double[:, ::1] av = np.ascontiguousarray(a, dtype=np.float64)
    cdef const double[:, ::1] xv = np.ascontiguousarray(xs, dtype=np.float64)
    cdef Py_ssize_t b = xv.shape[0], s = xv.shape[1]
    out = np.empty((b, s), dtype=np.float64)
    cdef double[:, ::1] ov = out
    cdef Py_ssize_t r
    with nogil:
        for r in range(b):
            _step(av, xv[r], ov[r], s)
    return out
