"""Truncated-SVD pseudoinverse and the spectral quantities built on it.

Matrices are plain ``numpy.ndarray`` objects in float64 (row-major, numpy's
default).  Data matrices follow the column-per-sample convention: ``X`` has
shape ``(d, n)``.
"""

from dataclasses import dataclass

import numpy as np

EPS = np.finfo(np.float64).eps


class NumericalFailure(ArithmeticError):
    """An SVD or eigendecomposition did not converge."""


class UndefinedCondition(ValueError):
    """Condition number requested for a rank-0 factorization."""


class NotPSD(ValueError):
    """Matrix has an eigenvalue clearly below zero."""


def as_finite_matrix(M, name="M"):
    A = np.asarray(M, dtype=np.float64)
    if A.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains NaN or Inf")
    return A


@dataclass(frozen=True)
class PseudoinverseFactorization:
    """Moore-Penrose pseudoinverse with the spectrum it was built from.

    Attributes
    ----------
    pinv : ndarray, shape (cols, rows)
    singular_values : ndarray
        All singular values of the source matrix, descending.
    retained_rank : int
        Number of singular values strictly above ``truncation_threshold``.
    truncation_threshold : float
    """

    pinv: np.ndarray
    singular_values: np.ndarray
    retained_rank: int
    truncation_threshold: float

    @property
    def shape(self):
        return self.pinv.shape[::-1]

    @property
    def sigma_max(self):
        return float(self.singular_values[0]) if self.singular_values.size else 0.0

    @property
    def sigma_min_retained(self):
        if self.retained_rank == 0:
            raise UndefinedCondition("no singular value above the truncation threshold")
        return float(self.singular_values[self.retained_rank - 1])

    @property
    def full_rank(self):
        return self.retained_rank == min(self.shape)

    @property
    def pinv_norm(self):
        """Operator norm of the pseudoinverse, 1 / smallest retained singular value."""
        if self.retained_rank == 0:
            return 0.0
        return 1.0 / self.sigma_min_retained


def default_threshold(singular_values, shape):
    smax = singular_values[0] if singular_values.size else 0.0
    return max(smax * max(shape) * EPS, np.finfo(np.float64).tiny)


def svd_pseudoinverse(M, rtol=None):
    """Pseudoinverse of ``M`` by inverting the retained singular values.

    Parameters
    ----------
    M : array_like, shape (m, n)
    rtol : float, optional
        Singular values ``<= rtol * sigma_max`` are discarded.  Defaults to
        ``max(m, n) * eps``.

    Returns
    -------
    PseudoinverseFactorization
    """
    A = as_finite_matrix(M)
    try:
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"SVD did not converge for {A.shape} matrix") from exc

    if rtol is None:
        threshold = default_threshold(s, A.shape)
    else:
        if rtol <= 0:
            raise ValueError("rtol must be positive")
        threshold = max((s[0] if s.size else 0.0) * rtol, np.finfo(np.float64).tiny)

    rank = int(np.count_nonzero(s > threshold))
    pinv = (Vt[:rank].T / s[:rank]) @ U[:, :rank].T
    return PseudoinverseFactorization(
        pinv=pinv,
        singular_values=s,
        retained_rank=rank,
        truncation_threshold=float(threshold),
    )


def operator_norm(M):
    """Largest singular value of ``M``."""
    A = as_finite_matrix(M)
    if A.size == 0:
        return 0.0
    try:
        return float(np.linalg.svd(A, compute_uv=False)[0])
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("SVD did not converge") from exc


def effective_condition_number(F):
    """Ratio of the largest to the smallest retained singular value."""
    if F.retained_rank < 1:
        raise UndefinedCondition("condition number of a rank-0 matrix is undefined")
    return F.sigma_max / F.sigma_min_retained


def psd_sqrt(G, tol=1e-10):
    """Symmetric square root of a positive semidefinite matrix.

    Eigenvalues in ``[-tol * lambda_max, 0)`` are treated as rounding noise and
    clamped to zero; anything lower raises :class:`NotPSD`.
    """
    A = as_finite_matrix(G, "G")
    if A.shape[0] != A.shape[1]:
        raise ValueError("G must be square")
    scale = max(np.abs(A).max(initial=0.0), np.finfo(np.float64).tiny)
    if np.abs(A - A.T).max(initial=0.0) > 1e-10 * scale:
        raise ValueError("G is not symmetric")
    try:
        w, V = np.linalg.eigh(0.5 * (A + A.T))
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure("eigendecomposition did not converge") from exc
    top = max(abs(w).max(initial=0.0), np.finfo(np.float64).tiny)
    if w.size and w[0] < -tol * top:
        raise NotPSD(f"eigenvalue {w[0]:.3e} below -{tol:g} * {top:.3e}")
    root = np.sqrt(np.clip(w, 0.0, None))
    S = (V * root) @ V.T
    return 0.5 * (S + S.T)
