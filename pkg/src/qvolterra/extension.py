"""Compatible finite-dimensional truncations of an infinite operator.

The level-n operator transforms coordinates up to n by the truncated
skew form and leaves the rest untouched; an optional tail operator can
act on the coordinates past n instead. Powers of the truncated family
approximate powers of the full operator with an explicit per-coordinate
error bound driven by the tail mass of the starting point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels
from .errors import BoundViolatedError
from .simplex import SimplexPoint, from_arrays, tail_mass
from .skew import SkewSpec

GAP_SLACK = 1e-10
TAIL_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class CompatibleFamily:
    """A base spec and the tail spec used past the truncation level.

    Truncations of one base are compatible by construction: deeper
    truncations restrict to shallower ones entrywise.
    """

    base: SkewSpec
    tail_choice: SkewSpec | None = None

    @property
    def tail(self) -> SkewSpec:
        return self.base if self.tail_choice is None else self.tail_choice


@dataclass(frozen=True)
class AlphaTable:
    """Cumulative amplification factors for iterated truncation gaps:
    alpha_1 = 1, alpha_m = alpha_{m-1} * (2 + 2**(m-1)) + 4**(m-1)."""

    values: tuple[float, ...]

    @staticmethod
    def up_to(m: int) -> "AlphaTable":
        if m < 1:
            raise ValueError("need m >= 1")
        vals = [1.0]
        for j in range(2, m + 1):
            vals.append(vals[-1] * (2.0 + 2.0 ** (j - 1)) + 2.0 ** (2 * (j - 1)))
        return AlphaTable(tuple(vals))


def alpha(m: int) -> float:
    """The m-th amplification factor."""
    return AlphaTable.up_to(m).values[-1]


def _masked_window(spec: SkewSpec, idx: np.ndarray, n: int) -> np.ndarray:
    """Window of spec over idx with rows and columns above level n zeroed."""
    w = spec.window(idx)
    low = idx <= n
    keep = low[:, None] & low[None, :]
    return np.where(keep, w, 0.0)


def vn_apply(fam: CompatibleFamily, n: int, x: SimplexPoint) -> SimplexPoint:
    """Level-n truncated application: coordinates up to n evolve under the
    truncated skew form, coordinates past n stay put."""
    if n < 1:
        raise ValueError("need n >= 1")
    idx, w = x.as_arrays()
    a = _masked_window(fam.base, idx, n)
    y = kernels.volterra_step(a, w)
    return from_arrays(idx, y, clamp_dust=True)


def wn_apply(fam: CompatibleFamily, n: int, x: SimplexPoint) -> SimplexPoint:
    """Level-n application with the tail operator acting past n."""
    if n < 1:
        raise ValueError("need n >= 1")
    idx, w = x.as_arrays()
    a = _masked_window(fam.base, idx, n)
    high = idx > n
    if high.any():
        t = fam.tail.window(idx)
        keep = high[:, None] & high[None, :]
        a = a + np.where(keep, t, 0.0)
    y = kernels.volterra_step(a, w)
    return from_arrays(idx, y, clamp_dust=True)


def _power_weights(fam: CompatibleFamily, x: SimplexPoint, n: int, m: int) -> np.ndarray:
    idx, w = x.as_arrays()
    a = _masked_window(fam.base, idx, n)
    rec, _steps, _norms = kernels.volterra_iterate(a, w, m, m)
    return rec[-1]


@dataclass(frozen=True)
class GapReport:
    """Per-coordinate gap between two truncation levels after m steps."""

    m: int
    n: int
    p: int
    indices: tuple[int, ...]
    gaps: tuple[float, ...]
    bounds: tuple[float, ...]

    @property
    def max_ratio(self) -> float:
        ratios = [g / b for g, b in zip(self.gaps, self.bounds) if b > 0.0]
        return max(ratios, default=0.0)


def power_truncation_gap(
    fam: CompatibleFamily, x: SimplexPoint, m: int, n: int, p: int, slack: float = GAP_SLACK
) -> GapReport:
    """Compare m-fold applications at levels n and n+p on coordinates up
    to n, certifying each gap against alpha_m * x_k * mass(x on n+1..n+p).
    """
    if m < 1 or n < 1 or p < 1:
        raise ValueError("need m, n, p >= 1")
    lo = _power_weights(fam, x, n, m)
    hi = _power_weights(fam, x, n + p, m)
    idx, w = x.as_arrays()
    window_mass = tail_mass(x, n) - tail_mass(x, n + p)
    factor = alpha(m)
    sel = idx <= n
    gaps = np.abs(lo[sel] - hi[sel])
    bounds = factor * w[sel] * window_mass
    over = gaps > bounds + slack
    if over.any():
        j = int(np.argmax(over))
        k = int(idx[sel][j])
        raise BoundViolatedError(m, k, float(gaps[j]), float(bounds[j] + slack))
    return GapReport(
        m,
        n,
        p,
        tuple(int(v) for v in idx[sel]),
        tuple(float(v) for v in gaps),
        tuple(float(v) for v in bounds),
    )


def converge_power(fam: CompatibleFamily, x: SimplexPoint, m: int, eps: float) -> SimplexPoint:
    """m-fold application at a truncation level chosen so the certified
    gap to any deeper level stays below eps per coordinate.

    Scans levels upward in steps of 16; at the support bound the result
    is the exact m-fold application.
    """
    if m < 1:
        raise ValueError("need m >= 1")
    if eps <= 0.0:
        raise ValueError("need eps > 0")
    top = x.max_index
    factor = alpha(m)
    n = 16
    while n < top and factor * tail_mass(x, n) >= eps:
        n += 16
    n = min(n, top)
    idx, _w = x.as_arrays()
    return from_arrays(idx, _power_weights(fam, x, n, m), clamp_dust=True)


def check_w_equals_v(
    fam: CompatibleFamily,
    x: SimplexPoint,
    n: int,
    other_tail: SkewSpec | None = None,
    slack: float = TAIL_SLACK,
) -> bool:
    """Certify that the tail choice is immaterial at level n:
    |W_n(x)_k - V_n(x)_k| <= x_k * tail_mass(x, n) per coordinate, and,
    when a second tail is supplied, the two tail variants stay within
    twice that bound of each other."""
    v = vn_apply(fam, n, x)
    w1 = wn_apply(fam, n, x)
    idx, wx = x.as_arrays()
    tail = tail_mass(x, n)
    per_coord = wx * tail

    def _assert_gap(a: SimplexPoint, b: SimplexPoint, scale: float):
        ga = dict(zip(a.indices, a.weights))
        gb = dict(zip(b.indices, b.weights))
        for pos, k in enumerate(idx):
            gap = abs(ga.get(int(k), 0.0) - gb.get(int(k), 0.0))
            limit = scale * per_coord[pos] + slack
            if gap > limit:
                raise BoundViolatedError(1, int(k), gap, limit)

    _assert_gap(w1, v, 1.0)
    if other_tail is not None:
        w2 = wn_apply(CompatibleFamily(fam.base, other_tail), n, x)
        _assert_gap(w2, v, 1.0)
        _assert_gap(w1, w2, 2.0)
    return True


def gap_study_rows(reports: Sequence[GapReport]):
    """CSV rows (m, n, p, k, gap, bound) across a batch of gap reports."""
    for rep in reports:
        for k, gap, bound in zip(rep.indices, rep.gaps, rep.bounds):
            yield rep.m, rep.n, rep.p, k, gap, bound
