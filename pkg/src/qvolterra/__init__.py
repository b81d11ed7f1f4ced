"""Quadratic Volterra operators on the infinite probability simplex.

Construction and application of skew-determined quadratic operators,
trajectory dynamics with convergence diagnostics, fixed-point region
computation by LP feasibility, and compatible finite-dimensional
truncations with certified error bounds.
"""

from .dynamics import (
    ConvergenceVerdict,
    Trajectory,
    check_growth_bound,
    check_limit_in_q,
    detect_convergence,
    iterate,
)
from .extension import (
    AlphaTable,
    CompatibleFamily,
    alpha,
    check_w_equals_v,
    converge_power,
    power_truncation_gap,
    vn_apply,
    wn_apply,
)
from .kernels import BACKEND as KERNEL_BACKEND
from .operators import (
    Operator,
    ShiftOperator,
    TensorOperator,
    VolterraOperator,
    conjugate_apply,
    fixed_point_residual,
    shift_apply,
    tensor_apply,
    volterra_apply,
)
from .qset import (
    LPProblem,
    LPResult,
    example52_emptiness,
    finitely_generated_solution,
    lp_feasible,
    q_membership_residual,
    q_set_point,
    verify_q_subset_fix,
)
from .simplex import (
    FaceIndexSet,
    SimplexPoint,
    extreme_point,
    geometric_profile,
    l1_distance,
    make_point,
    sample_interior,
    tail_mass,
)
from .skew import (
    AlternatingSignSpec,
    BlockDiagonalSpec,
    DenseSpec,
    DeterminingTensor,
    PairSequenceSpec,
    SkewSpec,
    ZeroSpec,
    from_tensor,
    is_pure,
    linear_induced_tensor,
    mix,
    negated,
    spec_from_json,
    to_tensor,
    truncate,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaTable",
    "AlternatingSignSpec",
    "BlockDiagonalSpec",
    "CompatibleFamily",
    "ConvergenceVerdict",
    "DenseSpec",
    "DeterminingTensor",
    "FaceIndexSet",
    "KERNEL_BACKEND",
    "LPProblem",
    "LPResult",
    "Operator",
    "PairSequenceSpec",
    "ShiftOperator",
    "SimplexPoint",
    "SkewSpec",
    "TensorOperator",
    "Trajectory",
    "VolterraOperator",
    "ZeroSpec",
    "alpha",
    "check_growth_bound",
    "check_limit_in_q",
    "check_w_equals_v",
    "conjugate_apply",
    "converge_power",
    "detect_convergence",
    "example52_emptiness",
    "extreme_point",
    "finitely_generated_solution",
    "fixed_point_residual",
    "from_tensor",
    "geometric_profile",
    "is_pure",
    "iterate",
    "l1_distance",
    "linear_induced_tensor",
    "lp_feasible",
    "make_point",
    "mix",
    "negated",
    "power_truncation_gap",
    "q_membership_residual",
    "q_set_point",
    "sample_interior",
    "shift_apply",
    "spec_from_json",
    "tail_mass",
    "tensor_apply",
    "to_tensor",
    "truncate",
    "validate",
    "verify_q_subset_fix",
    "vn_apply",
    "volterra_apply",
    "wn_apply",
]
