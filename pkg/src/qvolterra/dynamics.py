"""Trajectory iteration and convergence diagnostics.

A trajectory is the orbit x, V(x), V^2(x), ... of an operator handle,
stored with optional thinning plus the l1 size of every step taken.
Convergence is operationalized as a windowed Cauchy criterion; declared
nonconvergence is heuristic and labeled as such.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import BoundViolatedError, LimitNotInQError, TrajectoryTooShortError
from .operators import Operator, VolterraOperator
from .simplex import SimplexPoint, from_arrays, l1_distance

GROWTH_SLACK = 1e-12

STATUS_CONVERGED = "converged"
STATUS_NOT_CONVERGED = "not_converged_within_budget"
STATUS_OSCILLATING = "oscillating"


@dataclass(frozen=True)
class Trajectory:
    operator: Operator
    points: tuple[SimplexPoint, ...]
    recorded_steps: tuple[int, ...]
    step_norms: tuple[float, ...]

    @property
    def steps(self) -> int:
        return len(self.step_norms)

    @property
    def initial(self) -> SimplexPoint:
        return self.points[0]

    @property
    def final(self) -> SimplexPoint:
        return self.points[-1]


@dataclass(frozen=True)
class ConvergenceVerdict:
    status: str
    tol: float
    window: int
    limit: SimplexPoint | None = None
    at_step: int | None = None

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "tol": self.tol,
            "window": self.window,
            "at_step": self.at_step,
            "limit": self.limit.to_pairs() if self.limit is not None else None,
        }


def iterate(op: Operator, x0: SimplexPoint, steps: int, record_stride: int = 1) -> Trajectory:
    """Run ``steps`` applications of ``op`` starting from ``x0``.

    Points are recorded every ``record_stride`` steps (plus the final one);
    step sizes are recorded for every step.
    """
    if steps < 1:
        raise ValueError("need steps >= 1")
    if record_stride < 1:
        raise ValueError("need record_stride >= 1")
    if isinstance(op, VolterraOperator):
        idx, w = x0.as_arrays()
        a = op.spec.window(idx)
        rec, rec_steps, norms = kernels.volterra_iterate(a, w, steps, record_stride)
        points = tuple(from_arrays(idx, rec[r], clamp_dust=True) for r in range(rec.shape[0]))
        return Trajectory(op, points, tuple(int(s) for s in rec_steps), tuple(float(v) for v in norms))

    points_list = [x0]
    rec_list = [0]
    norms_list = []
    cur = x0
    for m in range(1, steps + 1):
        nxt = op.apply(cur)
        norms_list.append(l1_distance(nxt, cur))
        cur = nxt
        if m % record_stride == 0 or m == steps:
            points_list.append(cur)
            rec_list.append(m)
    return Trajectory(op, tuple(points_list), tuple(rec_list), tuple(norms_list))


def detect_convergence(traj: Trajectory, tol: float = 1e-9, window: int = 50) -> ConvergenceVerdict:
    """Windowed Cauchy check on the trailing step sizes.

    Converged: every step in the trailing window moved less than ``tol``.
    Oscillating: every step in the window stays above 10*tol without a
    strictly monotone decrease (heuristic, numerically unprovable).
    Otherwise: not converged within the budget.
    """
    if window < 2:
        raise ValueError("need window >= 2")
    norms = traj.step_norms
    if len(norms) < window:
        raise TrajectoryTooShortError(
            f"trajectory has {len(norms)} steps, diagnostic window needs {window}"
        )
    tail = norms[-window:]
    if all(v < tol for v in tail):
        at = 0
        for j in range(len(norms) - 1, -1, -1):
            if norms[j] >= tol:
                at = j + 1
                break
        return ConvergenceVerdict(STATUS_CONVERGED, tol, window, limit=traj.final, at_step=at)
    strictly_decreasing = all(tail[j + 1] < tail[j] for j in range(len(tail) - 1))
    if all(v > 10.0 * tol for v in tail) and not strictly_decreasing:
        return ConvergenceVerdict(STATUS_OSCILLATING, tol, window)
    return ConvergenceVerdict(STATUS_NOT_CONVERGED, tol, window)


def check_growth_bound(traj: Trajectory, slack: float = GROWTH_SLACK) -> bool:
    """Certify the doubling bound: coordinate k after m steps is at most
    2**m times its starting weight, plus slack."""
    if not isinstance(traj.operator, VolterraOperator):
        raise ValueError("growth bound applies to the skew-form operators only")
    x0 = traj.points[0]
    with np.errstate(over="ignore"):
        for point, m in zip(traj.points, traj.recorded_steps):
            base = np.asarray([x0.weight(k) for k in point.indices])
            w = np.asarray(point.weights)
            bound = np.ldexp(base, min(m, 2400)) + slack
            bad = w > bound
            if bad.any():
                j = int(np.argmax(bad))
                raise BoundViolatedError(m, point.indices[j], float(w[j]), float(bound[j]))
    return True


def check_limit_in_q(
    traj: Trajectory, verdict: ConvergenceVerdict, tol: float = 1e-6, q_residual=None
) -> bool:
    """Certify that a detected limit satisfies every fixed-point-region
    row of the trajectory's face: sum_i a_ki y_i <= tol for k in the face.

    ``q_residual`` may override the row evaluator; it defaults to the
    qset facility.
    """
    if verdict.status != STATUS_CONVERGED or verdict.limit is None:
        raise ValueError("limit check needs a converged verdict")
    if not isinstance(traj.operator, VolterraOperator):
        raise ValueError("fixed-point region is defined for skew-form operators")
    if q_residual is None:
        from .qset import face_rows

        q_residual = face_rows
    face = traj.points[0].indices
    rows, row_ids = q_residual(traj.operator.spec, verdict.limit, face)
    worst = int(np.argmax(rows))
    if rows[worst] > tol:
        raise LimitNotInQError(int(row_ids[worst]), float(rows[worst]), tol)
    return True


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """Sparse CSV rows: step, index, weight (recorded steps only)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "index", "weight"])
        for point, m in zip(traj.points, traj.recorded_steps):
            for idx, w in zip(point.indices, point.weights):
                writer.writerow([m, idx, repr(w)])


def diagnostics_json(traj: Trajectory, verdict: ConvergenceVerdict) -> dict:
    return {
        "steps": traj.steps,
        "recorded_steps": list(traj.recorded_steps),
        "step_norms": [float(v) for v in traj.step_norms],
        "verdict": verdict.to_json(),
    }
