"""Shared generators and independent oracles for the test suite."""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from qvolterra.simplex import SimplexPoint
from qvolterra.skew import DenseSpec

# Entries snap to a dyadic grid so that the affine tensor maps
# a -> (1 + a)/2 -> 2p - 1 round-trip without any floating-point loss.
DYADIC_GRID = 2.0**-26


def random_dense_skew(rng: np.random.Generator, dim: int, grid: float = DYADIC_GRID) -> DenseSpec:
    raw = rng.uniform(-1.0, 1.0, size=(dim, dim))
    raw = np.round(raw / grid) * grid
    upper = np.triu(raw, 1)
    return DenseSpec(upper - upper.T)


def random_interior(rng: np.random.Generator, dim: int) -> SimplexPoint:
    draws = rng.standard_exponential(dim)
    w = draws / draws.sum()
    return SimplexPoint(tuple(range(1, dim + 1)), tuple(float(v) for v in w))


def naive_volterra(entry_fn, x: dict[int, Fraction]) -> dict[int, Fraction]:
    """Exact-arithmetic evaluation of y_k = x_k (1 + sum_i a_ki x_i)."""
    out = {}
    for k, xk in x.items():
        acc = Fraction(1)
        for i, xi in x.items():
            acc += Fraction(entry_fn(k, i)) * xi
        out[k] = xk * acc
    return out


def naive_tensor(p: np.ndarray, x: dict[int, Fraction]) -> dict[int, Fraction]:
    """Exact-arithmetic evaluation of y_k = sum_ij p[i,j,k] x_i x_j."""
    d = p.shape[0]
    out = {}
    for k in range(1, d + 1):
        acc = Fraction(0)
        for i, xi in x.items():
            for j, xj in x.items():
                acc += Fraction(float(p[i - 1, j - 1, k - 1])) * xi * xj
        if acc != 0:
            out[k] = acc
    return out


def point_to_fractions(x: SimplexPoint) -> dict[int, Fraction]:
    return {i: Fraction(w) for i, w in zip(x.indices, x.weights)}


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240817)
