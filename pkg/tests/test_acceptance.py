"""Acceptance gate: one test per release criterion, each printing a
PASS/FAIL line (run with ``pytest tests/test_acceptance.py -v -s``).

Every criterion pins its tolerance and its runtime budget; sampling is
seeded so the gate is reproducible.
"""

import csv
import json
import subprocess
import sys
import time
from contextlib import contextmanager

import numpy as np
import pytest

from conftest import random_dense_skew, random_interior
from qvolterra import kernels
from qvolterra.dynamics import STATUS_CONVERGED, check_growth_bound, detect_convergence, iterate
from qvolterra.extension import CompatibleFamily, check_w_equals_v, converge_power, power_truncation_gap, vn_apply
from qvolterra.operators import (
    ShiftOperator,
    VolterraOperator,
    conjugate_apply,
    fixed_point_residual,
    tensor_apply,
    volterra_apply,
)
from qvolterra.qset import example52_emptiness, finitely_generated_solution, q_set_point
from qvolterra.simplex import FaceIndexSet, extreme_point, geometric_profile, make_point
from qvolterra.skew import (
    AlternatingSignSpec,
    BlockDiagonalSpec,
    PairSequenceSpec,
    ZeroSpec,
    from_tensor,
    to_tensor,
)


@contextmanager
def criterion(num: int, label: str, budget_s: float):
    t0 = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - t0
        if elapsed >= budget_s:
            print(f"[FAIL] criterion {num}: {label} (runtime {elapsed:.2f}s over budget {budget_s}s)")
            pytest.fail(f"criterion {num} runtime {elapsed:.2f}s exceeds budget {budget_s}s")
    except BaseException:
        print(f"[FAIL] criterion {num}: {label}")
        raise
    print(f"[PASS] criterion {num}: {label} ({elapsed:.2f}s)")


def test_criterion_01_simplex_preservation():
    rng = np.random.default_rng(101)
    with criterion(1, "simplex preservation over 200 random specs x 10 points", 5.0):
        for _ in range(200):
            dim = int(rng.integers(2, 65))
            spec = random_dense_skew(rng, dim)
            a = spec.matrix
            points = rng.dirichlet(np.ones(dim), size=10)
            raw = kernels.batch_volterra(a, points)
            assert raw.min() >= -1e-15
            assert (raw > 0.0).all()  # interior support preserved exactly
            assert np.abs(raw.sum(axis=1) - 1.0).max() <= 1e-12
            x = random_interior(rng, dim)
            y = volterra_apply(spec, x)
            assert y.indices == x.indices
            assert abs(sum(y.weights) - 1.0) <= 1e-12


def test_criterion_02_canonical_identities():
    rng = np.random.default_rng(202)
    with criterion(2, "conjugate symmetry, diagonal identity, tensor route equivalence", 5.0):
        for _ in range(200):
            dim = int(rng.integers(2, 65))
            spec = random_dense_skew(rng, dim)
            tensor = to_tensor(spec)
            assert np.array_equal(from_tensor(tensor).matrix, spec.matrix)  # exact roundtrip
            xs = [random_interior(rng, dim) for _ in range(10)]
            for x in xs:
                diag = conjugate_apply(spec, x, x)
                direct = volterra_apply(spec, x)
                for k in x.indices:
                    assert abs(diag.weight(k) - direct.weight(k)) <= 1e-14
                via_tensor = tensor_apply(tensor, x)
                for k in x.indices:
                    assert abs(via_tensor.weight(k) - direct.weight(k)) <= 1e-13
            xy = conjugate_apply(spec, xs[0], xs[1])
            yx = conjugate_apply(spec, xs[1], xs[0])
            for k in set(xy.indices) | set(yx.indices):
                assert abs(xy.weight(k) - yx.weight(k)) <= 1e-14


def test_criterion_03_lipschitz_and_growth():
    rng = np.random.default_rng(303)
    with criterion(3, "threefold step contraction on 1e4 pairs, doubling bound on 500 runs", 10.0):
        pairs_done = 0
        while pairs_done < 10_000:
            dim = int(rng.integers(2, 33))
            a = random_dense_skew(rng, dim).matrix
            xs = rng.dirichlet(np.ones(dim), size=100)
            ys = rng.dirichlet(np.ones(dim), size=100)
            vx = kernels.batch_volterra(a, xs)
            vy = kernels.batch_volterra(a, ys)
            lhs = np.abs(vx - vy).sum(axis=1)
            rhs = 3.0 * np.abs(xs - ys).sum(axis=1) + 1e-12
            assert (lhs <= rhs).all()
            pairs_done += 100
        for _ in range(500):
            dim = int(rng.integers(2, 17))
            op = VolterraOperator(random_dense_skew(rng, dim))
            traj = iterate(op, random_interior(rng, dim), 10)
            assert check_growth_bound(traj)


def test_criterion_04_fixed_points():
    rng = np.random.default_rng(404)
    with criterion(4, "extreme points fixed exactly; region witnesses fixed within 1e-9", 10.0):
        blocks = tuple(random_dense_skew(rng, 16) for _ in range(4))
        specs = [
            ZeroSpec(),
            random_dense_skew(rng, 64),
            BlockDiagonalSpec(blocks),
            PairSequenceSpec(tuple(float(c) for c in rng.uniform(0.1, 1.0, size=32))),
            AlternatingSignSpec(),
        ]
        for spec in specs:
            for i in range(1, 65):
                assert volterra_apply(spec, extreme_point(i)) == extreme_point(i)
        for _ in range(100):
            dim = int(rng.integers(2, 25))
            spec = random_dense_skew(rng, dim)
            result = q_set_point(spec, FaceIndexSet(tuple(range(1, dim + 1))))
            assert result.feasible
            assert fixed_point_residual(VolterraOperator(spec), result.witness) <= 1e-9


def test_criterion_05_pairwise_coupling_limit():
    with criterion(5, "paired-coupling run: converged, odd mass < 1e-6, monotone", 2.0):
        op = VolterraOperator(PairSequenceSpec((1.0,) * 20))
        x0 = make_point([(i, 1.0 / 40.0) for i in range(1, 41)])
        traj = iterate(op, x0, 5000)
        verdict = detect_convergence(traj, tol=1e-9, window=50)
        assert verdict.status == STATUS_CONVERGED
        odd_mass = sum(w for i, w in zip(verdict.limit.indices, verdict.limit.weights) if i % 2 == 1)
        assert odd_mass < 1e-6
        stacked = np.array([[p.weight(k) for k in range(1, 41)] for p in traj.points])
        diffs = np.diff(stacked, axis=0)
        assert diffs[:, 1::2].min() >= -1e-14  # even coordinates non-decreasing
        assert diffs[:, 0::2].max() <= 1e-14  # odd coordinates non-increasing


def test_criterion_06_emptiness_and_truncated_run():
    with criterion(6, "region emptiness for n in 2..64; 1e4-step run keeps doubling bound", 10.0):
        for n in range(2, 65):
            result = example52_emptiness(n)
            assert not result.feasible
        op = VolterraOperator(AlternatingSignSpec())
        x0 = make_point([(i, 1.0 / 40.0) for i in range(1, 41)])
        traj = iterate(op, x0, 10_000)
        assert check_growth_bound(traj)


def test_criterion_07_shift_has_no_fixed_point():
    with criterion(7, "shift translates support; residual stays >= twice the peak mass", 1.0):
        op = ShiftOperator()
        x0 = make_point([(1, 0.5), (2, 0.3), (3, 0.2)])
        traj = iterate(op, x0, 100)
        for m, point in zip(traj.recorded_steps, traj.points):
            assert point.indices == (1 + m, 2 + m, 3 + m)
            if m < 100:
                residual = traj.step_norms[m]
                assert residual >= 2.0 * max(point.weights) - 1e-12
                assert residual > 0.0
        assert fixed_point_residual(op, traj.final) > 0.0


def test_criterion_08_blockwise_construction():
    rng = np.random.default_rng(808)
    with criterion(8, "eight-block stitched solution satisfies reversed rows", 2.0):
        blocks = tuple(random_dense_skew(rng, int(rng.integers(2, 9))) for _ in range(8))
        z = finitely_generated_solution(blocks)
        assert abs(sum(z.weights) - 1.0) <= 1e-12
        stacked = BlockDiagonalSpec(blocks)
        total = stacked.dim
        dense = np.zeros(total)
        for i, w in zip(z.indices, z.weights):
            dense[i - 1] = w
        rows = stacked.window(np.arange(1, total + 1, dtype=np.int64)) @ dense
        assert rows.min() >= -1e-9


def test_criterion_09_truncation_machinery():
    rng = np.random.default_rng(909)
    with criterion(9, "compatibility, 50-config gap bounds, tail independence, chosen-level power", 60.0):
        fam = CompatibleFamily(AlternatingSignSpec())
        for n, n2 in [(8, 16), (16, 64), (64, 128), (100, 128), (127, 128)]:
            x = random_interior(rng, n)
            assert vn_apply(fam, n, x) == vn_apply(fam, n2, x)  # exact

        x = geometric_profile(2000, 0.99)
        configs = [(m, n, p) for m in (1, 2, 3, 4, 5) for n in (200, 500, 800, 1100, 1400) for p in (300, 600)]
        assert len(configs) == 50
        for m, n, p in configs:
            report = power_truncation_gap(fam, x, m, n, p, slack=1e-10)
            assert report.max_ratio <= 1.0 + 1e-9

        for level in (500, 1000):
            assert check_w_equals_v(
                CompatibleFamily(AlternatingSignSpec(), tail_choice=ZeroSpec()),
                x,
                level,
                other_tail=AlternatingSignSpec(),
            )

        for m in (1, 2, 3):
            approx = converge_power(fam, x, m, 1e-6)
            exact = x
            for _ in range(m):
                exact = vn_apply(fam, 2000, exact)
            worst = max(abs(approx.weight(k) - exact.weight(k)) for k in x.indices)
            assert worst < 1e-6


def test_criterion_10_injectivity_sampling():
    rng = np.random.default_rng(1010)
    with criterion(10, "1e4 separated pairs keep separated images", 5.0):
        kept = 0
        while kept < 10_000:
            dim = int(rng.integers(2, 17))
            a = random_dense_skew(rng, dim).matrix
            xs = rng.dirichlet(np.ones(dim), size=110)
            ys = rng.dirichlet(np.ones(dim), size=110)
            gaps_in = np.abs(xs - ys).sum(axis=1)
            sel = gaps_in >= 1e-6
            vx = kernels.batch_volterra(a, xs[sel])
            vy = kernels.batch_volterra(a, ys[sel])
            gaps_out = np.abs(vx - vy).sum(axis=1)
            assert (gaps_out >= 1e-12).all()
            kept += int(sel.sum())


def test_criterion_11_cli_reproducibility(tmp_path):
    def run(*args):
        proc = subprocess.run(
            [sys.executable, "-m", "qvolterra", *args], capture_output=True, text=True, cwd=tmp_path
        )
        assert proc.returncode == 0, proc.stderr
        return proc

    with criterion(11, "identical config and seed give byte-identical outputs", 60.0):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"steps": 300}))
        for out in ("a", "b"):
            run("iterate", "--scenario", "rps", "--config", str(cfg), "--seed", "11", "--out", out)
        for name in ("trajectory.csv", "diagnostics.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        for out in ("qa", "qb"):
            run("qset", "--scenario", "example-5.2", "--seed", "11", "--out", out)
        assert (tmp_path / "qa" / "qset.json").read_bytes() == (tmp_path / "qb" / "qset.json").read_bytes()
        for out in ("sa", "sb"):
            run("apply", "--scenario", "example-5.1", "--seed", "11", "--out", out)
        assert (tmp_path / "sa" / "apply.json").read_bytes() == (tmp_path / "sb" / "apply.json").read_bytes()
