"""Minimum-norm interpolation, leave-one-out pseudoinverse updates and
stability diagnostics for ridgeless least squares."""

__version__ = "0.1.0"

from .pinv import (
    NotPSD,
    NumericalFailure,
    PseudoinverseFactorization,
    UndefinedCondition,
    effective_condition_number,
    operator_norm,
    psd_sqrt,
    svd_pseudoinverse,
)
from .kernels import GramMatrix, KernelSpec, gram, kappa_bound, kernel_eval
from .interpolants import (
    InterpolantSolution,
    general_kernel_interpolant,
    general_linear_interpolant,
    gradient_descent_ls,
    min_norm_kernel,
    min_norm_linear,
    predict,
    rkhs_norm,
    tikhonov_kernel,
)
from .loo import (
    LooUpdateResult,
    build_loo_vectors,
    loo_pinv_kernel,
    loo_pinv_linear,
    loo_pinv_two_step,
    meyer_t5_update,
    meyer_t6_update,
    projector_identities,
)
from .stability import (
    StabilityReport,
    cvloo_empirical,
    cvro_empirical,
    excess_risk_mc,
    lemma2_rhs,
    solution_diff_rkhs,
    stability_bounds,
)
