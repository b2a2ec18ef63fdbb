import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ridgeless.kernels import KernelSpec, cross_kernel, gram, kappa_bound, kernel_eval
from ridgeless.pinv import svd_pseudoinverse


def test_kernel_eval_examples():
    x = np.array([1.0, 2.0, 3.0])
    assert kernel_eval(KernelSpec("rbf", 2.0), x, x) == 1.0
    assert kernel_eval(KernelSpec("linear"), np.eye(3)[0], np.eye(3)[1]) == 0.0
    xp = x + np.array([3.0, 4.0, 0.0])  # distance 5
    assert kernel_eval(KernelSpec("rbf", 5.0), x, xp) == pytest.approx(0.606530659, abs=1e-9)


def test_kernel_eval_dimension_mismatch():
    with pytest.raises(ValueError):
        kernel_eval(KernelSpec("linear"), np.ones(2), np.ones(3))


def test_spec_validation_and_roundtrip():
    with pytest.raises(ValueError):
        KernelSpec("rbf", 0.0)
    with pytest.raises(ValueError):
        KernelSpec("poly")
    spec = KernelSpec("rbf", 2.5)
    assert KernelSpec.from_dict(spec.to_dict()) == spec


def test_linear_gram_is_xtx(rng):
    X = rng.standard_normal((7, 5))
    G = gram(KernelSpec("linear"), X)
    np.testing.assert_allclose(G.matrix, X.T @ X, atol=1e-12)
    assert np.array_equal(G.matrix, G.matrix.T)


def test_rbf_gram_against_pairwise_loop(rng):
    spec = KernelSpec("rbf", 1.7)
    X = rng.standard_normal((4, 9))
    K = gram(spec, X).matrix
    ref = np.array([[kernel_eval(spec, X[:, i], X[:, j]) for j in range(9)] for i in range(9)])
    np.testing.assert_allclose(K, ref, atol=1e-14)
    assert np.array_equal(K, K.T)
    assert np.all(np.diag(K) == 1.0)
    assert np.all((K > 0) & (K <= 1))


def test_single_point_rbf():
    assert gram(KernelSpec("rbf", 1.0), np.ones((3, 1))).matrix.tolist() == [[1.0]]


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 40), st.integers(2, 30), st.integers(0, 2**32 - 1))
def test_rbf_gram_full_rank_on_distinct_points(n, d, seed):
    X = np.random.default_rng(seed).standard_normal((d, n))
    K = gram(KernelSpec("rbf", float(np.sqrt(d))), X).matrix
    assert svd_pseudoinverse(K).retained_rank == n


def test_cross_kernel_consistent_with_gram(rng):
    spec = KernelSpec("rbf", 3.0)
    X = rng.standard_normal((5, 6))
    np.testing.assert_allclose(cross_kernel(spec, X, X), gram(spec, X).matrix, atol=1e-14)


def test_fingerprint_tracks_data(rng):
    X = rng.standard_normal((3, 4))
    spec = KernelSpec("linear")
    assert gram(spec, X).source_fingerprint == gram(spec, X.copy()).source_fingerprint
    Y = X.copy()
    Y[0, 0] += 1.0
    assert gram(spec, X).source_fingerprint != gram(spec, Y).source_fingerprint


def test_kappa_rbf_is_one(rng):
    assert kappa_bound(KernelSpec("rbf", 0.3), rng.standard_normal((3, 8))) == 1.0


def test_kappa_linear_brute_force(rng):
    X = rng.standard_normal((6, 11))
    brute = max(abs(X[:, i] @ X[:, j]) for i, j in itertools.product(range(11), repeat=2))
    assert kappa_bound(KernelSpec("linear"), X) == pytest.approx(brute, rel=1e-12)


def test_kappa_linear_unit_columns(rng):
    X = rng.standard_normal((4, 10))
    X /= np.linalg.norm(X, axis=0)
    assert kappa_bound(KernelSpec("linear"), X) <= 1.0 + 1e-12
