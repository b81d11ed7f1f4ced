"""Skew-symmetric coefficient matrices and heredity tensors.

A Volterra-type quadratic operator is determined by an infinite
skew-symmetric matrix (a_ki) with |a_ki| <= 1. Five structural kinds are
supported: the zero matrix, an explicit finite dense block, a block-diagonal
stack of dense blocks, a sequence of 2x2 couplings on index pairs
(2k-1, 2k), and the alternating-sign rule a_ki = (-1)**i for i > k. General
quadratic operators are carried by their heredity tensor p[i, j, k].
"""

from __future__ import annotations

import abc
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    BoundExceededError,
    DimensionMismatchError,
    NonzeroDiagonalError,
    NotSkewError,
    NotStochasticError,
    NotVolterraError,
)

TENSOR_SUM_TOL = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.flags.writeable = False
    return a


class SkewSpec(abc.ABC):
    """Lazily evaluable coefficient matrix; immutable after construction."""

    kind: str

    @abc.abstractmethod
    def entry(self, k: int, i: int) -> float:
        """Coefficient a_ki. Indices beyond a finite kind's range give 0."""

    @abc.abstractmethod
    def window(self, indices: np.ndarray) -> np.ndarray:
        """Dense matrix W with W[r, c] = entry(indices[r], indices[c])."""

    @abc.abstractmethod
    def effective_dim(self) -> int | None:
        """Smallest n with entry(k, i) = 0 whenever max(k, i) > n; None if unbounded."""

    @abc.abstractmethod
    def to_json(self) -> dict:
        """Tagged JSON object; see spec_from_json for the inverse."""


@dataclass(frozen=True)
class ZeroSpec(SkewSpec):
    kind = "zero"

    def entry(self, k: int, i: int) -> float:
        return 0.0

    def window(self, indices: np.ndarray) -> np.ndarray:
        s = len(indices)
        return np.zeros((s, s))

    def effective_dim(self) -> int | None:
        return 0

    def to_json(self) -> dict:
        return {"kind": "zero"}


@dataclass(frozen=True, eq=False)
class DenseSpec(SkewSpec):
    """Explicit n x n coefficient block on indices 1..n; zero beyond."""

    matrix: np.ndarray
    kind = "dense"

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionMismatchError(f"need a square matrix, got shape {m.shape}")
        if not np.isfinite(m).all():
            raise ValueError("matrix entries must be finite")
        object.__setattr__(self, "matrix", _readonly(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def entry(self, k: int, i: int) -> float:
        n = self.dim
        if k > n or i > n:
            return 0.0
        return float(self.matrix[k - 1, i - 1])

    def window(self, indices: np.ndarray) -> np.ndarray:
        idx = np.asarray(indices, dtype=np.int64)
        s = len(idx)
        out = np.zeros((s, s))
        inside = idx <= self.dim
        pos = idx[inside] - 1
        out[np.ix_(inside, inside)] = self.matrix[np.ix_(pos, pos)]
        return out

    def effective_dim(self) -> int | None:
        return self.dim

    def to_json(self) -> dict:
        return {"kind": "dense", "rows": [[float(v) for v in row] for row in self.matrix]}


@dataclass(frozen=True, eq=False)
class BlockDiagonalSpec(SkewSpec):
    """Dense blocks placed on consecutive index ranges starting at 1."""

    blocks: tuple[DenseSpec, ...]
    kind = "block"
    _dense: DenseSpec = field(init=False, repr=False)

    def __post_init__(self):
        if not self.blocks:
            raise ValueError("need at least one block")
        object.__setattr__(self, "blocks", tuple(self.blocks))
        total = sum(b.dim for b in self.blocks)
        m = np.zeros((total, total))
        at = 0
        for b in self.blocks:
            m[at : at + b.dim, at : at + b.dim] = b.matrix
            at += b.dim
        object.__setattr__(self, "_dense", DenseSpec(m))

    @property
    def dim(self) -> int:
        return self._dense.dim

    def entry(self, k: int, i: int) -> float:
        return self._dense.entry(k, i)

    def window(self, indices: np.ndarray) -> np.ndarray:
        return self._dense.window(indices)

    def effective_dim(self) -> int | None:
        return self.dim

    def to_json(self) -> dict:
        return {
            "kind": "block",
            "blocks": [[[float(v) for v in row] for row in b.matrix] for b in self.blocks],
        }


@dataclass(frozen=True)
class PairSequenceSpec(SkewSpec):
    """Couplings a^(k) on index pairs (2k-1, 2k): the 2k-th coordinate
    grows at the expense of the (2k-1)-th. Coefficients must satisfy
    0 < a^(k) <= 1."""

    coeffs: tuple[float, ...]
    kind = "pair"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not self.coeffs:
            raise ValueError("need at least one pair coefficient")
        for pos, c in enumerate(self.coeffs, start=1):
            if c > 1.0:
                raise BoundExceededError(2 * pos, 2 * pos - 1, c)
            if c <= 0.0:
                raise ValueError(f"pair coefficient {pos} must be positive, got {c!r}")

    def entry(self, k: int, i: int) -> float:
        if k == i + 1 and k % 2 == 0:  # k even, i its odd partner
            pair = k // 2
            return self.coeffs[pair - 1] if pair <= len(self.coeffs) else 0.0
        if i == k + 1 and i % 2 == 0:
            pair = i // 2
            return -self.coeffs[pair - 1] if pair <= len(self.coeffs) else 0.0
        return 0.0

    def window(self, indices: np.ndarray) -> np.ndarray:
        idx = np.asarray(indices, dtype=np.int64)
        s = len(idx)
        out = np.zeros((s, s))
        for r in range(s):
            v = int(idx[r])
            partner = v - 1 if v % 2 == 0 else v + 1
            pair = (v + 1) // 2
            if pair > len(self.coeffs):
                continue
            c = np.searchsorted(idx, partner)
            if c < s and idx[c] == partner:
                out[r, c] = self.coeffs[pair - 1] if v % 2 == 0 else -self.coeffs[pair - 1]
        return out

    def effective_dim(self) -> int | None:
        return 2 * len(self.coeffs)

    def to_json(self) -> dict:
        return {"kind": "pair", "coeffs": [float(c) for c in self.coeffs]}


@dataclass(frozen=True)
class AlternatingSignSpec(SkewSpec):
    """Rule a_ki = (-1)**i above the diagonal, completed skew below:
    a_ki = -(-1)**k for i < k. Every off-diagonal entry is +-1."""

    kind = "alternating"

    def entry(self, k: int, i: int) -> float:
        if i > k:
            return 1.0 if i % 2 == 0 else -1.0
        if i < k:
            return -1.0 if k % 2 == 0 else 1.0
        return 0.0

    def window(self, indices: np.ndarray) -> np.ndarray:
        idx = np.asarray(indices, dtype=np.int64)
        ii = idx[None, :]
        kk = idx[:, None]
        sign_i = np.where(ii % 2 == 0, 1.0, -1.0)
        sign_k = np.where(kk % 2 == 0, 1.0, -1.0)
        return np.where(ii > kk, sign_i, np.where(ii < kk, -sign_k, 0.0))

    def effective_dim(self) -> int | None:
        return None

    def to_json(self) -> dict:
        return {"kind": "alternating"}


def spec_from_json(obj: dict) -> SkewSpec:
    kind = obj.get("kind")
    if kind == "zero":
        return ZeroSpec()
    if kind == "dense":
        return DenseSpec(np.asarray(obj["rows"], dtype=np.float64))
    if kind == "block":
        return BlockDiagonalSpec(tuple(DenseSpec(np.asarray(b, dtype=np.float64)) for b in obj["blocks"]))
    if kind == "pair":
        return PairSequenceSpec(tuple(obj["coeffs"]))
    if kind == "alternating":
        return AlternatingSignSpec()
    raise ValueError(f"unknown skew spec kind {kind!r}")


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of a validation pass: which window was checked and whether
    that window covered the whole matrix."""

    kind: str
    window: int
    exhaustive: bool


def validate(spec: SkewSpec, window: int = 64) -> ValidationReport:
    """Check skew-symmetry, the unit bound, and the zero diagonal.

    Finite kinds are checked exhaustively regardless of ``window``;
    unbounded kinds are checked on indices 1..window.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    dim = spec.effective_dim()
    exhaustive = dim is not None
    n = dim if exhaustive else window
    if n == 0:
        return ValidationReport(spec.kind, 0, True)
    w = spec.window(np.arange(1, n + 1, dtype=np.int64))
    for k in range(n):
        if w[k, k] != 0.0:
            raise NonzeroDiagonalError(k + 1, float(w[k, k]))
        for i in range(k + 1, n):
            if w[k, i] != -w[i, k]:
                raise NotSkewError(k + 1, i + 1, float(w[k, i]), float(w[i, k]))
            if abs(w[k, i]) > 1.0:
                raise BoundExceededError(k + 1, i + 1, float(w[k, i]))
    return ValidationReport(spec.kind, n, exhaustive)


def truncate(spec: SkewSpec, n: int) -> DenseSpec:
    """Dense n x n restriction to indices 1..n. Nested truncations agree."""
    if n < 1:
        raise ValueError("need n >= 1")
    return DenseSpec(spec.window(np.arange(1, n + 1, dtype=np.int64)))


def is_pure(spec: SkewSpec, window: int = 64) -> bool:
    """True when every checked off-diagonal coefficient has magnitude 1.

    Exhaustive for finite kinds; for unbounded kinds the answer covers
    indices 1..window only.
    """
    dim = spec.effective_dim()
    n = dim if dim is not None else window
    if n < 2:
        return False
    w = spec.window(np.arange(1, n + 1, dtype=np.int64))
    off = ~np.eye(n, dtype=bool)
    return bool(np.all(np.abs(w[off]) == 1.0))


def mix(a: DenseSpec, b: DenseSpec, lam: float) -> DenseSpec:
    """Entrywise convex combination lam*a + (1-lam)*b of two dense specs."""
    if not (0.0 <= lam <= 1.0):
        raise ValueError("lam must lie in [0, 1]")
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dims differ: {a.dim} vs {b.dim}")
    return DenseSpec(lam * a.matrix + (1.0 - lam) * b.matrix)


def negated(spec: SkewSpec) -> SkewSpec:
    """The spec with every coefficient negated (finite kinds and zero only)."""
    if isinstance(spec, ZeroSpec):
        return spec
    if isinstance(spec, DenseSpec):
        return DenseSpec(-spec.matrix)
    if isinstance(spec, BlockDiagonalSpec):
        return BlockDiagonalSpec(tuple(DenseSpec(-b.matrix) for b in spec.blocks))
    raise ValueError(f"cannot negate spec kind {spec.kind!r} within the supported kinds")


@dataclass(frozen=True, eq=False)
class DeterminingTensor:
    """Heredity coefficients p[i, j, k] of a quadratic operator, stored
    dense at finite dimension with 0-based axes."""

    p: np.ndarray
    volterra: bool

    def __post_init__(self):
        arr = np.asarray(self.p, dtype=np.float64)
        if arr.ndim != 3 or len(set(arr.shape)) != 1:
            raise DimensionMismatchError(f"need a cubic array, got shape {arr.shape}")
        d = arr.shape[0]
        if (arr < 0.0).any():
            i, j, k = np.argwhere(arr < 0.0)[0]
            raise ValueError(f"negative coefficient p[{i+1},{j+1},{k+1}] = {arr[i, j, k]!r}")
        if not np.array_equal(arr, arr.transpose(1, 0, 2)):
            raise ValueError("coefficients must be symmetric in the parent pair")
        sums = arr.sum(axis=2)
        bad = np.abs(sums - 1.0) > TENSOR_SUM_TOL
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise ValueError(
                f"coefficients for parents ({i+1},{j+1}) sum to {sums[i, j]!r}, not 1"
            )
        if self.volterra:
            mask = np.ones((d, d, d), dtype=bool)
            ii = np.arange(d)
            mask[ii, :, ii] = False
            mask[:, ii, ii] = False
            if (arr[mask] != 0.0).any():
                viol = np.argwhere((arr != 0.0) & mask)[0]
                i, j, k = (int(v) for v in viol)
                raise NotVolterraError(i + 1, j + 1, k + 1, float(arr[i, j, k]))
        object.__setattr__(self, "p", _readonly(arr))

    @property
    def dim(self) -> int:
        return self.p.shape[0]

    def value(self, i: int, j: int, k: int) -> float:
        return float(self.p[i - 1, j - 1, k - 1])

    def to_json(self) -> dict:
        entries = [
            [int(i) + 1, int(j) + 1, int(k) + 1, float(self.p[i, j, k])]
            for i, j, k in np.argwhere(self.p != 0.0)
        ]
        return {"kind": "tensor", "dim": self.dim, "values": entries, "volterra": self.volterra}

    @staticmethod
    def from_json(obj: dict) -> "DeterminingTensor":
        d = int(obj["dim"])
        arr = np.zeros((d, d, d))
        for i, j, k, v in obj["values"]:
            arr[int(i) - 1, int(j) - 1, int(k) - 1] = float(v)
        return DeterminingTensor(arr, bool(obj.get("volterra", False)))


def to_tensor(spec: DenseSpec) -> DeterminingTensor:
    """Heredity tensor of a dense skew spec: each child keeps a parent
    species, with p[i, k, k] = (1 + a_ki) / 2 off the diagonal."""
    a = spec.matrix
    d = spec.dim
    p = np.zeros((d, d, d))
    ii = np.arange(d)
    p[ii, ii, ii] = 1.0
    for k in range(d):
        for i in range(d):
            if i == k:
                continue
            p[i, k, k] = (1.0 + a[k, i]) / 2.0
            p[k, i, k] = p[i, k, k]
    return DeterminingTensor(p, volterra=True)


def from_tensor(t: DeterminingTensor) -> DenseSpec:
    """Recover the skew spec from a Volterra heredity tensor."""
    arr = t.p
    d = t.dim
    if not t.volterra:
        ii = np.arange(d)
        mask = np.ones((d, d, d), dtype=bool)
        mask[ii, :, ii] = False
        mask[:, ii, ii] = False
        if (arr[mask] != 0.0).any():
            viol = np.argwhere((arr != 0.0) & mask)[0]
            i, j, k = (int(v) for v in viol)
            raise NotVolterraError(i + 1, j + 1, k + 1, float(arr[i, j, k]))
    a = np.zeros((d, d))
    for k in range(d):
        for i in range(d):
            if i != k:
                a[k, i] = 2.0 * arr[i, k, k] - 1.0
    spec = DenseSpec(a)
    validate(spec)
    return spec


def linear_induced_tensor(stoch: np.ndarray) -> DeterminingTensor:
    """Tensor of the quadratic operator induced by a row-stochastic matrix:
    p[i, j, k] = (stoch[i, k] + stoch[j, k]) / 2."""
    m = np.asarray(stoch, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatchError(f"need a square matrix, got shape {m.shape}")
    if (m < 0.0).any():
        raise NotStochasticError("negative entry in stochastic matrix")
    rows = m.sum(axis=1)
    if np.abs(rows - 1.0).max() > TENSOR_SUM_TOL:
        r = int(np.argmax(np.abs(rows - 1.0)))
        raise NotStochasticError(f"row {r + 1} sums to {rows[r]!r}, not 1")
    p = 0.5 * (m[:, None, :] + m[None, :, :])
    is_identity = np.array_equal(m, np.eye(m.shape[0]))
    return DeterminingTensor(p, volterra=is_identity)
