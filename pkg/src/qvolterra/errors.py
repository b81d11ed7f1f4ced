"""Exception types shared across the package."""

from __future__ import annotations


class VolterraError(Exception):
    """Base class for every error raised by qvolterra."""


class NotNormalizedError(VolterraError):
    """Weights of a simplex point do not sum to 1 within tolerance."""

    def __init__(self, total: float, tol: float):
        self.total = total
        self.tol = tol
        super().__init__(f"weights sum to {total!r}, off from 1 by more than {tol!r}")


class NegativeWeightError(VolterraError):
    """A weight is negative beyond floating-point dust."""

    def __init__(self, index: int, weight: float):
        self.index = index
        self.weight = weight
        super().__init__(f"negative weight {weight!r} at index {index}")


class DuplicateIndexError(VolterraError):
    """The same coordinate index appears twice."""

    def __init__(self, index: int):
        self.index = index
        super().__init__(f"duplicate index {index}")


class NotSkewError(VolterraError):
    """entry(k, i) != -entry(i, k) at the reported position."""

    def __init__(self, k: int, i: int, value: float, mirrored: float):
        self.position = (k, i)
        super().__init__(
            f"skew-symmetry violated at ({k}, {i}): {value!r} vs mirrored {mirrored!r}"
        )


class BoundExceededError(VolterraError):
    """|entry(k, i)| > 1 at the reported position."""

    def __init__(self, k: int, i: int, value: float):
        self.position = (k, i)
        self.value = value
        super().__init__(f"|entry| > 1 at ({k}, {i}): {value!r}")


class NonzeroDiagonalError(VolterraError):
    """entry(k, k) != 0 at the reported position."""

    def __init__(self, k: int, value: float):
        self.position = (k, k)
        self.value = value
        super().__init__(f"nonzero diagonal at ({k}, {k}): {value!r}")


class DimensionMismatchError(VolterraError):
    """Two finite objects that must share a dimension do not."""


class NotVolterraError(VolterraError):
    """Tensor has mass outside the parent-species coordinates."""

    def __init__(self, i: int, j: int, k: int, value: float):
        self.position = (i, j, k)
        super().__init__(f"p[{i},{j},{k}] = {value!r} but k is not one of the parents")


class NotStochasticError(VolterraError):
    """A matrix expected to be row-stochastic is not."""


class SupportOverflowError(VolterraError):
    """An operator image needs support beyond the allowed range."""

    def __init__(self, index: int, cap: int):
        self.index = index
        self.cap = cap
        super().__init__(f"support index {index} exceeds cap {cap}")


class TrajectoryTooShortError(VolterraError):
    """Trajectory has fewer steps than the diagnostic window."""


class BoundViolatedError(VolterraError):
    """A certified inequality failed at the reported position."""

    def __init__(self, m: int, k: int, gap: float, bound: float):
        self.step = m
        self.index = k
        self.gap = gap
        self.bound = bound
        super().__init__(
            f"bound violated at step {m}, coordinate {k}: {gap!r} > {bound!r}"
        )


class LimitNotInQError(VolterraError):
    """Trajectory limit violates a fixed-point-region constraint row."""

    def __init__(self, k: int, value: float, tol: float):
        self.row = k
        self.value = value
        super().__init__(f"constraint row {k} evaluates to {value!r} > {tol!r}")


class FixViolationError(VolterraError):
    """A point certified inside Q is not fixed within tolerance."""

    def __init__(self, residual: float, tol: float):
        self.residual = residual
        super().__init__(f"fixed-point residual {residual!r} exceeds {tol!r}")


class BlockInfeasibleError(VolterraError):
    """Per-block inequality system reported infeasible by the solver.

    Feasibility is guaranteed in finite dimension, so this signals a solver
    tolerance failure rather than genuine infeasibility.
    """


class UnexpectedlyFeasibleError(VolterraError):
    """An emptiness certificate run found the system feasible."""


class CyclingDetectedError(VolterraError):
    """Simplex pivoting exceeded its iteration cap; treated as a bug signal."""
