"""Numpy fallback for the hot kernels.

Same contracts as the compiled module ``_kernels_c``; one of the two is
selected at import time by ``qvolterra.kernels``.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"


def volterra_step(a: np.ndarray, w: np.ndarray) -> np.ndarray:
    """One application y_k = w_k * (1 + sum_i a[k, i] * w_i)."""
    return w * (1.0 + a @ w)


def conjugate_step(a: np.ndarray, wx: np.ndarray, wy: np.ndarray) -> np.ndarray:
    """Symmetrized bilinear application of the coefficient window."""
    return 0.5 * (wx * (1.0 + a @ wy) + wy * (1.0 + a @ wx))


def volterra_iterate(
    a: np.ndarray, w0: np.ndarray, steps: int, stride: int = 1
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Iterate the quadratic map, recording thinned snapshots.

    Returns (records, recorded_steps, norms): snapshots at steps
    0, stride, 2*stride, ... plus the final step, and the l1 size of every
    step taken.
    """
    if steps < 1:
        raise ValueError("need steps >= 1")
    if stride < 1:
        raise ValueError("need stride >= 1")
    s = w0.shape[0]
    rec_steps = list(range(0, steps + 1, stride))
    if rec_steps[-1] != steps:
        rec_steps.append(steps)
    records = np.empty((len(rec_steps), s))
    norms = np.empty(steps)
    w = np.array(w0, dtype=np.float64)
    records[0] = w
    nxt = 1
    for m in range(1, steps + 1):
        y = w * (1.0 + a @ w)
        norms[m - 1] = np.abs(y - w).sum()
        w = y
        if nxt < len(rec_steps) and m == rec_steps[nxt]:
            records[nxt] = w
            nxt += 1
    return records, np.asarray(rec_steps, dtype=np.int64), norms


def batch_volterra(a: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Apply the quadratic map to each row of ``xs`` at once."""
    return xs * (1.0 + xs @ a.T)
