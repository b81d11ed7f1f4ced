import numpy as np
import pytest

from conftest import random_dense_skew
from qvolterra.operators import VolterraOperator, fixed_point_residual
from qvolterra.qset import (
    LPProblem,
    LPResult,
    example52_emptiness,
    face_rows,
    finitely_generated_solution,
    lp_feasible,
    q_membership_residual,
    q_set_point,
    verify_q_subset_fix,
)
from qvolterra.simplex import FaceIndexSet, extreme_point, make_point
from qvolterra.skew import BlockDiagonalSpec, DenseSpec, PairSequenceSpec, ZeroSpec, negated

RPS = DenseSpec([[0, 1, -1], [-1, 0, 1], [1, -1, 0]])
FACE12 = FaceIndexSet((1, 2))


class TestLPFeasible:
    def test_no_rows_any_simplex_point(self):
        problem = LPProblem(FACE12, np.zeros((0, 2)), ())
        result = lp_feasible(problem)
        assert result.feasible
        assert abs(sum(result.witness.weights) - 1.0) <= 1e-12

    def test_pinned_coordinate(self):
        problem = LPProblem(FACE12, np.array([[1.0, 0.0]]), ("<=",))
        result = lp_feasible(problem)
        assert result.feasible
        assert result.witness == extreme_point(2)

    def test_contradictory_rows_infeasible(self):
        rows = np.array([[-1.0, 1.0], [1.0, -1.0]])
        problem = LPProblem(FACE12, rows, ("<=", "<="), rhs=np.array([0.0, -0.1]))
        result = lp_feasible(problem)
        assert not result.feasible
        assert result.witness is None

    def test_witness_satisfies_rows_independently(self, rng):
        for _ in range(20):
            dim = int(rng.integers(2, 12))
            spec = random_dense_skew(rng, dim)
            face = FaceIndexSet(tuple(range(1, dim + 1)))
            problem = LPProblem(face, spec.matrix, ("<=",) * dim)
            result = lp_feasible(problem)
            assert result.feasible
            y = np.array([result.witness.weight(i) for i in face.indices])
            assert (spec.matrix @ y).max() <= 1e-9
            assert abs(y.sum() - 1.0) <= 1e-12
            assert (y >= 0).all()

    def test_geq_sense(self):
        problem = LPProblem(FACE12, np.array([[1.0, -1.0]]), (">=",))
        result = lp_feasible(problem)
        y = result.witness
        assert y.weight(1) >= y.weight(2) - 1e-9


class TestQSetPoint:
    def test_zero_spec_whole_face(self):
        result = q_set_point(ZeroSpec(), FaceIndexSet((1, 2, 3)))
        assert result.feasible

    def test_pair_coupling_witness(self):
        result = q_set_point(PairSequenceSpec((1.0,)), FACE12)
        assert result.feasible
        assert result.witness == extreme_point(2)

    def test_rps_center(self):
        result = q_set_point(RPS, FaceIndexSet((1, 2, 3)))
        assert result.feasible
        for i in (1, 2, 3):
            assert result.witness.weight(i) == pytest.approx(1 / 3, abs=1e-9)


class TestMembershipResidual:
    def test_zero_spec(self, rng):
        x = make_point([(1, 0.25), (4, 0.75)])
        assert q_membership_residual(ZeroSpec(), x) == 0.0

    def test_pair_even_vertex_inside(self):
        assert q_membership_residual(PairSequenceSpec((1.0,)), extreme_point(2)) == 0.0

    def test_pair_odd_vertex_outside(self):
        assert q_membership_residual(PairSequenceSpec((1.0,)), extreme_point(1)) == 1.0

    def test_dense_rows_checked_exhaustively(self):
        # the violating row sits past support+2, visible only because the
        # finite kind is scanned over its full range
        m = np.zeros((5, 5))
        m[4, 0] = 1.0
        m[0, 4] = -1.0
        spec = DenseSpec(m)
        assert q_membership_residual(spec, extreme_point(1)) == 1.0


class TestQSubsetFix:
    def test_zero_spec(self, rng):
        x = make_point([(2, 0.5), (3, 0.5)])
        assert verify_q_subset_fix(ZeroSpec(), x)

    def test_rps_center_is_fixed(self):
        center = make_point([(1, 1 / 3), (2, 1 / 3), (3, 1 / 3)])
        assert verify_q_subset_fix(RPS, center, tol=1e-9)

    def test_pair_even_vertex_fixed(self):
        assert verify_q_subset_fix(PairSequenceSpec((1.0,)), extreme_point(2))

    def test_rejects_non_member(self):
        with pytest.raises(ValueError):
            verify_q_subset_fix(PairSequenceSpec((1.0,)), extreme_point(1))

    def test_region_members_fixed_over_random_specs(self, rng):
        for _ in range(20):
            dim = int(rng.integers(2, 10))
            spec = random_dense_skew(rng, dim)
            result = q_set_point(spec, FaceIndexSet(tuple(range(1, dim + 1))))
            assert result.feasible  # always solvable at finite dimension
            resid = fixed_point_residual(VolterraOperator(spec), result.witness)
            assert resid <= 1e-9


class TestFinitelyGenerated:
    def test_single_block_pins_first(self):
        z = finitely_generated_solution([DenseSpec([[0.0, 1.0], [-1.0, 0.0]])])
        assert z == extreme_point(2)

    def test_two_identical_blocks(self):
        block = DenseSpec([[0.0, 1.0], [-1.0, 0.0]])
        z = finitely_generated_solution([block, block])
        assert z == make_point([(2, 0.5), (4, 0.5)])

    def test_zero_blocks(self):
        z = finitely_generated_solution([DenseSpec(np.zeros((2, 2))), DenseSpec(np.zeros((3, 3)))])
        assert abs(sum(z.weights) - 1.0) <= 1e-12
        spec = BlockDiagonalSpec((DenseSpec(np.zeros((2, 2))), DenseSpec(np.zeros((3, 3)))))
        vals, _ = face_rows(spec, z, range(1, 6))
        assert np.abs(vals).max() == 0.0

    def test_random_blocks_satisfy_reversed_rows(self, rng):
        blocks = tuple(random_dense_skew(rng, int(rng.integers(2, 9))) for _ in range(8))
        z = finitely_generated_solution(blocks)
        total = sum(b.dim for b in blocks)
        assert abs(sum(z.weights) - 1.0) <= 1e-12
        vals, _ = face_rows(BlockDiagonalSpec(blocks), z, range(1, total + 1))
        assert vals.min() >= -1e-9

    def test_weights_halve_and_close(self, rng):
        blocks = [DenseSpec(np.zeros((1, 1))) for _ in range(4)]
        z = finitely_generated_solution(blocks)
        assert z.weights == (0.5, 0.25, 0.125, 0.125)


class TestEmptinessCertificate:
    @pytest.mark.parametrize("n", [5, 10, 20])
    def test_infeasible(self, n):
        result = example52_emptiness(n)
        assert not result.feasible

    def test_small_n_rejected(self):
        with pytest.raises(ValueError):
            example52_emptiness(1)


class TestAntisymmetricDuality:
    def test_negated_spec_solves_reversed_system(self, rng):
        for _ in range(10):
            dim = int(rng.integers(2, 8))
            spec = random_dense_skew(rng, dim)
            face = FaceIndexSet(tuple(range(1, dim + 1)))
            fwd = q_set_point(spec, face)
            bwd = q_set_point(negated(spec), face)
            assert fwd.feasible and bwd.feasible
            y = np.array([bwd.witness.weight(i) for i in face.indices])
            # region point of the negated matrix satisfies the reversed rows
            assert (spec.matrix @ y).min() >= -1e-9


def test_lp_result_json():
    result = LPResult(True, extreme_point(2), 3)
    data = result.to_json()
    assert data["status"] == "feasible"
    assert data["witness"] == [[2, 1.0]]


def test_lp_problem_json():
    problem = LPProblem(FACE12, np.array([[1.0, -1.0]]), ("<=",))
    data = problem.to_json()
    assert data["face"] == [1, 2]
    assert data["senses"] == ["<="]
