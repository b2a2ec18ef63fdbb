import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ridgeless.pinv import (
    NotPSD,
    UndefinedCondition,
    default_threshold,
    effective_condition_number,
    operator_norm,
    psd_sqrt,
    svd_pseudoinverse,
)
from ridgeless.selftest import penrose_residuals


def power_iteration_norm(A, iters=500, seed=0):
    """Largest singular value by power iteration on A^T A (independent of SVD)."""
    v = np.random.default_rng(seed).standard_normal(A.shape[1])
    for _ in range(iters):
        w = A.T @ (A @ v)
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        v = w / nw
    return float(np.linalg.norm(A @ v))


finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 12), st.integers(1, 12)), elements=finite))
def test_penrose_conditions_property(A):
    F = svd_pseudoinverse(A)
    # rounding in the products grows like cond * eps
    cond = effective_condition_number(F) if F.retained_rank else 1.0
    tol = max(1e-9, 100 * np.finfo(float).eps * cond)
    assert max(penrose_residuals(A, F.pinv)) <= tol


def test_rank_deficient_matches_numpy(rng):
    A = rng.standard_normal((9, 3)) @ rng.standard_normal((3, 7))
    F = svd_pseudoinverse(A)
    assert F.retained_rank == 3
    assert not F.full_rank
    np.testing.assert_allclose(F.pinv, np.linalg.pinv(A), atol=1e-10)


def test_zero_matrix():
    F = svd_pseudoinverse(np.zeros((3, 4)))
    assert F.retained_rank == 0
    assert F.pinv.shape == (4, 3)
    assert np.all(F.pinv == 0)
    assert F.pinv_norm == 0.0
    with pytest.raises(UndefinedCondition):
        effective_condition_number(F)


def test_threshold_truncates_tiny_singular_values():
    A = np.diag([1.0, 1e-20])
    F = svd_pseudoinverse(A)
    assert F.retained_rank == 1
    assert F.truncation_threshold == pytest.approx(default_threshold(F.singular_values, A.shape))
    assert svd_pseudoinverse(A, rtol=1e-25).retained_rank == 2


@pytest.mark.parametrize("bad", [np.nan, np.inf])
def test_non_finite_input_rejected(bad):
    A = np.eye(3)
    A[1, 2] = bad
    with pytest.raises(ValueError, match="NaN or Inf"):
        svd_pseudoinverse(A)


def test_operator_norm_against_power_iteration(rng):
    for shape in [(5, 5), (12, 4), (3, 20)]:
        A = rng.standard_normal(shape)
        assert operator_norm(A) == pytest.approx(power_iteration_norm(A), rel=1e-8)


def test_condition_number_diagonal():
    F = svd_pseudoinverse(np.diag([4.0, 2.0, 0.5, 0.0]))
    assert effective_condition_number(F) == pytest.approx(8.0)
    assert F.sigma_max == 4.0
    assert F.sigma_min_retained == 0.5


def test_psd_sqrt_squares_back(rng):
    B = rng.standard_normal((6, 3))
    G = B @ B.T
    S = psd_sqrt(G)
    np.testing.assert_allclose(S @ S, G, atol=1e-10)
    np.testing.assert_allclose(S, S.T)


def test_psd_sqrt_rejects_indefinite_and_asymmetric():
    with pytest.raises(NotPSD):
        psd_sqrt(np.diag([1.0, -1.0]))
    with pytest.raises(ValueError, match="symmetric"):
        psd_sqrt(np.array([[1.0, 0.5], [0.0, 1.0]]))
