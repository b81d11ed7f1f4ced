"""Application of quadratic operators on the simplex.

Three variants: the skew-matrix canonical form (with its symmetric
bilinear companion), general tensor-defined operators, and the
fixed-point-free right shift.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import SupportOverflowError
from .simplex import SimplexPoint, from_arrays, l1_distance
from .skew import DeterminingTensor, SkewSpec, ValidationReport, validate

DEFAULT_VALIDATION_WINDOW = 64


class Operator(abc.ABC):
    """Immutable handle; safe to apply concurrently."""

    @abc.abstractmethod
    def apply(self, x: SimplexPoint) -> SimplexPoint: ...


@dataclass(frozen=True, eq=False)
class VolterraOperator(Operator):
    spec: SkewSpec
    _report: ValidationReport = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_report", validate(self.spec, DEFAULT_VALIDATION_WINDOW))

    def apply(self, x: SimplexPoint) -> SimplexPoint:
        return volterra_apply(self.spec, x)


@dataclass(frozen=True, eq=False)
class TensorOperator(Operator):
    tensor: DeterminingTensor
    max_support: int | None = None

    def apply(self, x: SimplexPoint) -> SimplexPoint:
        return tensor_apply(self.tensor, x, self.max_support)


@dataclass(frozen=True)
class ShiftOperator(Operator):
    def apply(self, x: SimplexPoint) -> SimplexPoint:
        return shift_apply(x)


def volterra_apply(spec: SkewSpec, x: SimplexPoint) -> SimplexPoint:
    """y_k = x_k * (1 + sum_i a_ki x_i), summed over the support of x.

    The result keeps the support of x and sums to 1 within the point
    tolerance; no renormalization is performed.
    """
    idx, w = x.as_arrays()
    a = spec.window(idx)
    y = kernels.volterra_step(a, w)
    return from_arrays(idx, y, clamp_dust=True)


def conjugate_apply(spec: SkewSpec, x: SimplexPoint, y: SimplexPoint) -> SimplexPoint:
    """Symmetric bilinear companion; its diagonal is volterra_apply."""
    union = sorted(set(x.indices) | set(y.indices))
    idx = np.asarray(union, dtype=np.int64)
    wx = np.asarray([x.weight(i) for i in union])
    wy = np.asarray([y.weight(i) for i in union])
    a = spec.window(idx)
    z = kernels.conjugate_step(a, wx, wy)
    return from_arrays(idx, z, clamp_dust=True)


def tensor_apply(
    t: DeterminingTensor, x: SimplexPoint, max_support: int | None = None
) -> SimplexPoint:
    """y_k = sum_ij p[i, j, k] x_i x_j for a general heredity tensor.

    The image support can grow but never beyond the tensor dimension;
    mass appearing past ``max_support`` raises SupportOverflowError.
    """
    d = t.dim
    if x.max_index > d:
        raise SupportOverflowError(x.max_index, d)
    dense = np.zeros(d)
    idx, w = x.as_arrays()
    dense[idx - 1] = w
    y = np.einsum("ijk,i,j->k", t.p, dense, dense, optimize=True)
    cap = d if max_support is None else max_support
    out_idx = np.nonzero(y)[0] + 1
    if len(out_idx) and out_idx[-1] > cap:
        raise SupportOverflowError(int(out_idx[-1]), cap)
    return from_arrays(out_idx.astype(np.int64), y[out_idx - 1], clamp_dust=True)


def shift_apply(x: SimplexPoint) -> SimplexPoint:
    """Move every coordinate one index to the right."""
    return SimplexPoint(tuple(i + 1 for i in x.indices), x.weights)


def fixed_point_residual(op: Operator, x: SimplexPoint) -> float:
    """l1 distance between op(x) and x; zero exactly at fixed points."""
    return l1_distance(op.apply(x), x)
