"""Fixed-point region computation via LP feasibility.

The region Q of a skew spec collects the simplex points whose coefficient
rows are all nonpositive; every such point is fixed. Membership systems
are solved with a self-contained dense Phase-I simplex method using
Bland's anti-cycling rule, and every feasible witness is re-verified
independently of the solver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    BlockInfeasibleError,
    CyclingDetectedError,
    FixViolationError,
    UnexpectedlyFeasibleError,
    VolterraError,
)
from .operators import VolterraOperator, fixed_point_residual
from .simplex import FaceIndexSet, SimplexPoint, from_arrays
from .skew import AlternatingSignSpec, BlockDiagonalSpec, DenseSpec, SkewSpec

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-10


@dataclass(frozen=True)
class LPProblem:
    """Homogeneous-by-default inequality rows over a face's simplex."""

    face: FaceIndexSet
    rows: np.ndarray
    senses: tuple[str, ...]
    rhs: np.ndarray = None  # type: ignore[assignment]

    def __post_init__(self):
        rows = np.atleast_2d(np.asarray(self.rows, dtype=np.float64))
        if rows.size == 0:
            rows = rows.reshape(0, len(self.face.indices))
        if rows.shape[1] != len(self.face.indices):
            raise ValueError("row width must match the face size")
        if len(self.senses) != rows.shape[0]:
            raise ValueError("one sense per row required")
        for s in self.senses:
            if s not in ("<=", ">="):
                raise ValueError(f"unknown sense {s!r}")
        rhs = self.rhs
        rhs = np.zeros(rows.shape[0]) if rhs is None else np.asarray(rhs, dtype=np.float64)
        if rhs.shape != (rows.shape[0],):
            raise ValueError("one rhs entry per row required")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "rhs", rhs)

    def to_json(self) -> dict:
        return {
            "face": [int(i) for i in self.face.indices],
            "rows": [[float(v) for v in row] for row in self.rows],
            "senses": list(self.senses),
            "rhs": [float(v) for v in self.rhs],
        }


@dataclass(frozen=True)
class LPResult:
    feasible: bool
    witness: SimplexPoint | None
    iterations: int

    def to_json(self) -> dict:
        return {
            "status": "feasible" if self.feasible else "infeasible",
            "witness": self.witness.to_pairs() if self.witness is not None else None,
            "iterations": self.iterations,
        }


def _phase_one(rows: np.ndarray, senses, rhs: np.ndarray, pivot_tol: float) -> tuple[float, np.ndarray, int]:
    """Minimize the total artificial mass of the system
    rows*y (sense) rhs, sum(y) = 1, y >= 0.

    Returns (objective, y, iterations).
    """
    m, d = rows.shape
    # normalize every inequality to <= form, then to equalities with slacks
    a = rows.copy()
    b = rhs.copy()
    for i, s in enumerate(senses):
        if s == ">=":
            a[i] = -a[i]
            b[i] = -b[i]
    eq_a = np.vstack([a, np.ones((1, d))])
    eq_b = np.concatenate([b, [1.0]])
    nrows = m + 1
    slack = np.zeros((nrows, m))
    slack[:m, :] = np.eye(m)
    tableau = np.hstack([eq_a, slack])
    # make all right-hand sides nonnegative; flipped slack columns lose
    # their basic role and the row gets an artificial instead
    needs_art = [m]  # the simplex equality row always does
    for i in range(m):
        if eq_b[i] < 0.0:
            tableau[i] = -tableau[i]
            eq_b[i] = -eq_b[i]
            needs_art.append(i)
    needs_art.sort()
    nart = len(needs_art)
    art = np.zeros((nrows, nart))
    basis = np.empty(nrows, dtype=np.int64)
    for i in range(m):
        basis[i] = d + i  # slack
    for pos, i in enumerate(needs_art):
        art[i, pos] = 1.0
        basis[i] = d + m + pos
    tableau = np.hstack([tableau, art, eq_b[:, None]])
    ncols = d + m + nart

    cost = np.zeros(ncols + 1)
    cost[d + m : d + m + nart] = 1.0
    # reduced costs of the starting basis: c - sum of artificial-basic rows
    red = cost.copy()
    for i in needs_art:
        red -= tableau[i]
    red = red[:ncols]

    iterations = 0
    cap = 2000 + 200 * (nrows + ncols)
    while True:
        entering = -1
        for j in range(ncols):
            if red[j] < -pivot_tol:
                entering = j
                break
        if entering < 0:
            break
        leave = -1
        best = np.inf
        for i in range(nrows):
            coef = tableau[i, entering]
            if coef > pivot_tol:
                ratio = tableau[i, -1] / coef
                if ratio < best - 1e-15 or (abs(ratio - best) <= 1e-15 and (leave < 0 or basis[i] < basis[leave])):
                    best = ratio
                    leave = i
        if leave < 0:
            raise CyclingDetectedError("improving column with no blocking row in a bounded system")
        piv = tableau[leave, entering]
        tableau[leave] /= piv
        col = tableau[:, entering].copy()
        col[leave] = 0.0
        tableau -= np.outer(col, tableau[leave])
        red -= red[entering] * tableau[leave, :ncols]
        basis[leave] = entering
        iterations += 1
        if iterations > cap:
            raise CyclingDetectedError(f"pivot cap {cap} exceeded")

    # artificial mass at the final vertex, free of incremental drift
    obj = sum(tableau[i, -1] for i in range(nrows) if basis[i] >= d + m)
    y = np.zeros(d)
    for i in range(nrows):
        if basis[i] < d:
            y[basis[i]] = tableau[i, -1]
    return float(obj), y, iterations


def lp_feasible(problem: LPProblem, feas_tol: float = FEAS_TOL, pivot_tol: float = PIVOT_TOL) -> LPResult:
    """Feasibility of the system over the face's simplex.

    A feasible verdict ships a witness verified against the raw rows,
    independent of the pivoting arithmetic. An infeasible verdict means
    the minimal artificial mass stayed above ``feas_tol``.
    """
    obj, y, iterations = _phase_one(problem.rows, problem.senses, problem.rhs, pivot_tol)
    if obj > feas_tol:
        return LPResult(False, None, iterations)
    y = np.where((y < 0.0) & (y >= -feas_tol), 0.0, y)
    if (y < 0.0).any():
        raise VolterraError(f"solver produced a negative witness coordinate: {y.min()!r}")
    total = y.sum()
    if abs(total - 1.0) > 1e-6:
        raise VolterraError(f"solver witness mass {total!r} far from 1")
    y = y / total
    resid = problem.rows @ y - problem.rhs
    for i, s in enumerate(problem.senses):
        val = resid[i] if s == "<=" else -resid[i]
        if val > feas_tol:
            raise VolterraError(
                f"witness verification failed on row {i}: violation {val!r} > {feas_tol!r}"
            )
    idx = np.asarray(problem.face.indices, dtype=np.int64)
    witness = from_arrays(idx, y)
    return LPResult(True, witness, iterations)


def _rect_rows(spec: SkewSpec, row_ids: np.ndarray, col_ids: np.ndarray) -> np.ndarray:
    """Matrix of entry(k, i) for k in row_ids, i in col_ids."""
    union = np.unique(np.concatenate([row_ids, col_ids]))
    w = spec.window(union)
    rpos = np.searchsorted(union, row_ids)
    cpos = np.searchsorted(union, col_ids)
    return w[np.ix_(rpos, cpos)]


def face_rows(spec: SkewSpec, y: SimplexPoint, face_indices) -> tuple[np.ndarray, np.ndarray]:
    """Row values sum_i a_ki y_i for every k in the face."""
    rows = np.asarray(sorted(face_indices), dtype=np.int64)
    idx, w = y.as_arrays()
    mat = _rect_rows(spec, rows, idx)
    return mat @ w, rows


def q_set_point(spec: SkewSpec, face: FaceIndexSet) -> LPResult:
    """Find a point of the fixed-point region on a face, or certify there
    is none: rows a_ki (k in the face) must all be nonpositive."""
    idx = np.asarray(face.indices, dtype=np.int64)
    rows = spec.window(idx)
    problem = LPProblem(face, rows, ("<=",) * len(idx))
    return lp_feasible(problem)


def q_membership_residual(spec: SkewSpec, y: SimplexPoint) -> float:
    """Worst constraint-row value over the checked rows, clipped at 0.

    Finite kinds are checked on every structurally nonzero row; unbounded
    kinds on rows up to max(support) + 2, which covers where their rules
    can still see the support.
    """
    dim = spec.effective_dim()
    top = dim if dim is not None else y.max_index + 2
    if top < 1:
        return 0.0
    rows = np.arange(1, top + 1, dtype=np.int64)
    idx, w = y.as_arrays()
    vals = _rect_rows(spec, rows, idx) @ w
    return max(0.0, float(vals.max()))


def verify_q_subset_fix(spec: SkewSpec, y: SimplexPoint, tol: float = FEAS_TOL) -> bool:
    """Check that a region member is fixed by the operator."""
    resid = q_membership_residual(spec, y)
    if resid > tol:
        raise ValueError(f"point is not in the region: residual {resid!r} > {tol!r}")
    fix = fixed_point_residual(VolterraOperator(spec), y)
    if fix > tol:
        raise FixViolationError(fix, tol)
    return True


def finitely_generated_solution(blocks: "Sequence[DenseSpec]") -> SimplexPoint:
    """Solve the reversed (>=) row system blockwise and stitch the
    per-block solutions together with halving weights.

    Block n of N gets weight 2**-n, except the last which repeats the
    previous weight so the total closes to 1 exactly.
    """
    blocks = tuple(blocks)
    if not blocks:
        raise ValueError("need at least one block")
    n_blocks = len(blocks)
    weights = [2.0 ** -(i + 1) for i in range(n_blocks)]
    weights[-1] = 2.0 ** -(n_blocks - 1) if n_blocks > 1 else 1.0

    combined_idx: list[int] = []
    combined_w: list[float] = []
    offset = 0
    for block, scale in zip(blocks, weights):
        face = FaceIndexSet(tuple(range(1, block.dim + 1)))
        problem = LPProblem(face, block.matrix, (">=",) * block.dim)
        result = lp_feasible(problem)
        if not result.feasible:
            raise BlockInfeasibleError(
                f"block of dim {block.dim} reported infeasible; the reversed system "
                "is always solvable in finite dimension, so this is a tolerance failure"
            )
        for i, w in zip(result.witness.indices, result.witness.weights):
            combined_idx.append(offset + i)
            combined_w.append(scale * w)
        offset += block.dim

    point = from_arrays(np.asarray(combined_idx, dtype=np.int64), np.asarray(combined_w))
    stacked = BlockDiagonalSpec(blocks)
    vals, _ = face_rows(stacked, point, range(1, offset + 1))
    worst = float(vals.min())
    if worst < -FEAS_TOL:
        raise BlockInfeasibleError(f"combined point violates a row by {worst!r}")
    return point


def example52_emptiness(n: int) -> LPResult:
    """Certify that the alternating-sign region system on the face
    {1..n} with rows 1..n+2 has no solution."""
    if n < 2:
        raise ValueError("need n >= 2")
    spec = AlternatingSignSpec()
    face = FaceIndexSet(tuple(range(1, n + 1)))
    row_ids = np.arange(1, n + 3, dtype=np.int64)
    col_ids = np.asarray(face.indices, dtype=np.int64)
    rows = _rect_rows(spec, row_ids, col_ids)
    problem = LPProblem(face, rows, ("<=",) * len(row_ids))
    result = lp_feasible(problem)
    if result.feasible:
        raise UnexpectedlyFeasibleError(
            f"alternating-sign system on 1..{n} admitted a point; expected empty"
        )
    return result
