"""Finitely supported points of the infinite probability simplex.

A point is a sparse map from positive integer indices to strictly positive
weights summing to 1. Faces of the simplex are described by finite index
sets; sampling and profile constructors supply test points on them.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import DuplicateIndexError, NegativeWeightError, NotNormalizedError

SUM_TOL = 1e-12

# Negative results of simplex-preserving arithmetic no larger than this in
# magnitude are treated as floating-point dust and clamped to zero.
DUST_TOL = 1e-15


@dataclass(frozen=True)
class SimplexPoint:
    """Immutable sparse simplex point: ascending indices, positive weights."""

    indices: tuple[int, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        prev = 0
        for idx, w in zip(self.indices, self.weights):
            if idx <= prev:
                raise ValueError(f"indices must be ascending and >= 1, got {idx}")
            prev = idx
            if w < 0.0:
                raise NegativeWeightError(idx, w)
            if w == 0.0:
                raise ValueError(f"zero weight stored at index {idx}")
        total = float(np.add.reduce(np.asarray(self.weights, dtype=float))) if self.weights else 0.0
        if abs(total - 1.0) > SUM_TOL:
            raise NotNormalizedError(total, SUM_TOL)

    @cached_property
    def _lookup(self) -> dict[int, float]:
        return dict(zip(self.indices, self.weights))

    @cached_property
    def _arrays(self) -> tuple[np.ndarray, np.ndarray]:
        idx = np.asarray(self.indices, dtype=np.int64)
        w = np.asarray(self.weights, dtype=np.float64)
        idx.flags.writeable = False
        w.flags.writeable = False
        return idx, w

    def as_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Index and weight arrays, read-only, aligned and ascending."""
        return self._arrays

    def weight(self, index: int) -> float:
        return self._lookup.get(index, 0.0)

    @property
    def support(self) -> tuple[int, ...]:
        return self.indices

    @property
    def max_index(self) -> int:
        return self.indices[-1]

    def __len__(self) -> int:
        return len(self.indices)

    def to_pairs(self) -> list[list[float]]:
        """JSON form: list of [index, weight] pairs, indices ascending."""
        return [[int(i), float(w)] for i, w in zip(self.indices, self.weights)]

    @staticmethod
    def from_pairs(pairs: Iterable[Sequence[float]]) -> "SimplexPoint":
        return make_point([(int(i), float(w)) for i, w in pairs])


def make_point(pairs: Iterable[tuple[int, float]]) -> SimplexPoint:
    """Build a point from (index, weight) pairs.

    Zero weights are dropped. Raises rather than renormalizing when the
    total drifts from 1 by more than ``SUM_TOL``.
    """
    seen: dict[int, float] = {}
    for idx, w in pairs:
        idx = int(idx)
        if idx < 1:
            raise ValueError(f"indices start at 1, got {idx}")
        if idx in seen:
            raise DuplicateIndexError(idx)
        if w < 0.0:
            raise NegativeWeightError(idx, w)
        seen[idx] = float(w)
    kept = sorted((i, w) for i, w in seen.items() if w != 0.0)
    return SimplexPoint(tuple(i for i, _ in kept), tuple(w for _, w in kept))


def from_arrays(indices: np.ndarray, weights: np.ndarray, clamp_dust: bool = False) -> SimplexPoint:
    """Point from aligned arrays; optionally clamp dust-negative weights to 0.

    The arrays must already be in ascending index order. Weights that are
    exactly zero (or clamped to zero) are dropped.
    """
    weights = np.asarray(weights, dtype=np.float64)
    if clamp_dust:
        neg = weights < 0.0
        if neg.any():
            worst = weights[neg].min()
            if worst < -DUST_TOL:
                k = int(np.asarray(indices)[weights == worst][0])
                raise NegativeWeightError(k, float(worst))
            weights = np.where(neg, 0.0, weights)
    keep = weights != 0.0
    idx = np.asarray(indices, dtype=np.int64)[keep]
    return SimplexPoint(tuple(int(i) for i in idx), tuple(float(w) for w in weights[keep]))


def extreme_point(n: int) -> SimplexPoint:
    """The point with all mass at index n."""
    if n < 1:
        raise ValueError(f"indices start at 1, got {n}")
    return SimplexPoint((int(n),), (1.0,))


def l1_distance(x: SimplexPoint, y: SimplexPoint) -> float:
    """Sum of |x_k - y_k| over the union of supports. At most 2."""
    total = 0.0
    ylookup = y._lookup
    for idx, w in zip(x.indices, x.weights):
        total += abs(w - ylookup.get(idx, 0.0))
    xlookup = x._lookup
    for idx, w in zip(y.indices, y.weights):
        if idx not in xlookup:
            total += w
    return total


def tail_mass(x: SimplexPoint, n: int) -> float:
    """Total weight at indices strictly greater than n."""
    idx, w = x.as_arrays()
    cut = int(np.searchsorted(idx, n, side="right"))
    return float(w[cut:].sum())


@dataclass(frozen=True)
class FaceIndexSet:
    """Finite set of coordinate indices defining a face of the simplex."""

    indices: tuple[int, ...]

    def __post_init__(self):
        if not self.indices:
            raise ValueError("a face needs at least one index")
        prev = 0
        for idx in self.indices:
            if idx < 1:
                raise ValueError(f"indices start at 1, got {idx}")
            if idx <= prev:
                raise ValueError("face indices must be ascending and distinct")
            prev = idx

    @staticmethod
    def of(indices: Iterable[int]) -> "FaceIndexSet":
        return FaceIndexSet(tuple(sorted({int(i) for i in indices})))

    def __len__(self) -> int:
        return len(self.indices)

    def __contains__(self, index: int) -> bool:
        return index in set(self.indices)


def sample_interior(face: FaceIndexSet, seed: int) -> SimplexPoint:
    """Uniform sample from the relative interior of a face, seeded.

    Uses normalized i.i.d. standard exponentials, so the support equals the
    face exactly and repeated calls with one seed agree.
    """
    rng = np.random.default_rng(seed)
    n = len(face.indices)
    draws = rng.standard_exponential(n)
    while np.any(draws == 0.0):
        draws = rng.standard_exponential(n)
    w = draws / draws.sum()
    return SimplexPoint(tuple(face.indices), tuple(float(v) for v in w))


def geometric_profile(n: int, ratio: float) -> SimplexPoint:
    """Point on indices 1..n with weights proportional to ratio**k."""
    if n < 1:
        raise ValueError("need n >= 1")
    if not (0.0 < ratio < 1.0):
        raise ValueError("ratio must lie strictly between 0 and 1")
    w = np.power(ratio, np.arange(1, n + 1, dtype=np.float64))
    w /= w.sum()
    return SimplexPoint(tuple(range(1, n + 1)), tuple(float(v) for v in w))
