"""Interpolating and regularized least-squares solutions.

Kernel solutions carry a coefficient vector ``c`` of length n, predicting
``f(x) = sum_j c_j K(x_j, x)``.  Linear solutions carry ``w`` of length d,
predicting ``f(x) = w @ x``.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .kernels import GramMatrix, KernelSpec, cross_kernel, fingerprint
from .pinv import as_finite_matrix, psd_sqrt, svd_pseudoinverse

log = logging.getLogger(__name__)

MODES = ("min_norm", "perturbed", "tikhonov", "gradient_descent")


class StepSizeError(ArithmeticError):
    """Gradient descent diverged for the chosen step."""


class FingerprintMismatch(ValueError):
    pass


@dataclass(frozen=True)
class InterpolantSolution:
    mode: str
    coefficients: np.ndarray
    kernel: Optional[KernelSpec] = None  # None means linear model in R^d
    training_fingerprint: str = ""
    v: Optional[np.ndarray] = None
    lam: Optional[float] = None

    @property
    def is_kernel(self):
        return self.kernel is not None


def interpolation_tolerance(y):
    return 1e-8 * max(1.0, float(np.linalg.norm(y)))


def _gram_parts(G):
    if isinstance(G, GramMatrix):
        return G.matrix, G.kernel, G.source_fingerprint
    return as_finite_matrix(G, "G"), None, ""


def _check_len(vec, n, name):
    vec = np.asarray(vec, dtype=np.float64).ravel()
    if vec.shape[0] != n:
        raise ValueError(f"{name} has length {vec.shape[0]}, expected {n}")
    return vec


def min_norm_kernel(G, y, factorization=None):
    """Minimum-norm interpolant ``c = K^+ y``."""
    K, spec, fp = _gram_parts(G)
    y = _check_len(y, K.shape[0], "y")
    F = factorization if factorization is not None else svd_pseudoinverse(K)
    c = F.pinv @ y
    if F.full_rank:
        resid = np.linalg.norm(K @ c - y)
        if resid > interpolation_tolerance(y):
            log.warning("full-rank Gram but interpolation residual %.3e", resid)
    return InterpolantSolution("min_norm", c, spec, fp)


def general_kernel_interpolant(G, y, v, factorization=None):
    """``c = K^+ y + (I - K^+ K) v``."""
    K, spec, fp = _gram_parts(G)
    n = K.shape[0]
    y = _check_len(y, n, "y")
    v = _check_len(v, n, "v")
    F = factorization if factorization is not None else svd_pseudoinverse(K)
    c = F.pinv @ y + v - F.pinv @ (K @ v)
    return InterpolantSolution("perturbed", c, spec, fp, v=v.copy())


def min_norm_linear(X, y, factorization=None):
    """Moore-Penrose solution ``w^T = y^T X^+`` for ``X`` of shape (d, n)."""
    X = as_finite_matrix(X, "X")
    y = _check_len(y, X.shape[1], "y")
    F = factorization if factorization is not None else svd_pseudoinverse(X)
    w = F.pinv.T @ y
    return InterpolantSolution("min_norm", w, None, fingerprint(X))


def null_space_component(X, Xpinv, v):
    """``(I - X X^+) v``, the part of ``v`` orthogonal to the span of the samples."""
    return v - X @ (Xpinv @ v)


def general_linear_interpolant(X, y, v, factorization=None):
    """``w^T = y^T X^+ + v^T (I - X X^+)``."""
    X = as_finite_matrix(X, "X")
    y = _check_len(y, X.shape[1], "y")
    v = _check_len(v, X.shape[0], "v")
    F = factorization if factorization is not None else svd_pseudoinverse(X)
    w = F.pinv.T @ y + null_space_component(X, F.pinv, v)
    return InterpolantSolution("perturbed", w, None, fingerprint(X), v=v.copy())


def tikhonov_kernel(G, y, lam):
    """Ridge solution ``c = (K + lam I)^{-1} y`` via a Cholesky solve."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    K, spec, fp = _gram_parts(G)
    y = _check_len(y, K.shape[0], "y")
    A = K + lam * np.eye(K.shape[0])
    try:
        c = scipy.linalg.solve(A, y, assume_a="pos")
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError):
        # K is PSD only up to rounding; fall back to a symmetric indefinite solve
        c = scipy.linalg.solve(A, y, assume_a="sym")
    return InterpolantSolution("tikhonov", c, spec, fp, lam=float(lam))


def gradient_descent_ls(X, y, step, iters, kernel=False, callback=None, window=20):
    """Full-batch gradient descent on ``0.5 * ||residual||^2`` from zero.

    Linear problems (``kernel=False``) take ``X`` of shape (d, n) and iterate
    ``w <- w - step * X (X^T w - y)``; convergence needs
    ``step < 2 / sigma_max(X)^2``.  Kernel problems take a Gram matrix and
    iterate ``c <- c - step * (K c - y)``, the functional gradient step in the
    RKHS; convergence needs ``step < 2 / sigma_max(K)``.

    ``callback(t, iterate)`` is called after every update.  Raises
    :class:`StepSizeError` if the loss grows across a ``window`` of steps.
    """
    if not step > 0:
        raise ValueError("step must be positive")
    if kernel:
        A, spec, fp = _gram_parts(X)
        y = _check_len(y, A.shape[0], "y")
        apply = lambda c: A @ c
        grad = lambda r: r
        x = np.zeros(A.shape[0])
    else:
        A = as_finite_matrix(X, "X")
        spec, fp = None, fingerprint(A)
        y = _check_len(y, A.shape[1], "y")
        apply = lambda w: A.T @ w
        grad = lambda r: A @ r
        x = np.zeros(A.shape[0])

    checkpoint = 0.5 * float(y @ y)
    # losses at rounding level may wobble upward without meaning divergence
    floor = 1e-20 * checkpoint + 1e-300
    for t in range(1, iters + 1):
        r = apply(x) - y
        x = x - step * grad(r)
        if callback is not None:
            callback(t, x)
        if t % window == 0 or t == iters:
            r = apply(x) - y
            loss = 0.5 * float(r @ r)
            if not np.isfinite(loss) or loss > checkpoint * (1 + 1e-9) + floor:
                raise StepSizeError(f"loss rose from {checkpoint:.3e} to {loss:.3e} by step {t}")
            checkpoint = loss
    return InterpolantSolution("gradient_descent", x, spec, fp)


def predict(sol, X_train, X_query):
    """Evaluate a solution at the columns of ``X_query``."""
    X_train = as_finite_matrix(X_train, "X_train")
    Q = as_finite_matrix(X_query, "X_query")
    if sol.training_fingerprint and sol.training_fingerprint != fingerprint(X_train):
        raise FingerprintMismatch("solution was fitted on different training data")
    if sol.is_kernel:
        return cross_kernel(sol.kernel, Q, X_train) @ sol.coefficients
    return Q.T @ sol.coefficients


def rkhs_norm(G, p):
    """RKHS norm of ``sum_j p_j K(x_j, .)``, i.e. ``||K^{1/2} p||``."""
    K, _, _ = _gram_parts(G)
    p = _check_len(p, K.shape[0], "p")
    return float(np.linalg.norm(psd_sqrt(K) @ p))
