"""Linear and Gaussian RBF kernels, Gram matrices, boundedness constants."""

import hashlib
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist, pdist, squareform

from .pinv import as_finite_matrix

KINDS = ("linear", "rbf")


@dataclass(frozen=True)
class KernelSpec:
    kind: str = "rbf"
    sigma: float = 5.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kernel must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "rbf" and not (np.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be positive for rbf, got {self.sigma}")

    def to_dict(self):
        if self.kind == "linear":
            return {"kernel": "linear"}
        return {"kernel": "rbf", "sigma": float(self.sigma)}

    @classmethod
    def from_dict(cls, d):
        kind = d.get("kernel", "rbf")
        if kind == "linear":
            return cls("linear")
        return cls(kind, float(d.get("sigma", 5.0)))


def fingerprint(*arrays):
    """Short content hash identifying a dataset."""
    h = hashlib.sha256()
    for a in arrays:
        a = np.ascontiguousarray(a, dtype=np.float64)
        h.update(str(a.shape).encode())
        h.update(a.tobytes())
    return h.hexdigest()[:16]


@dataclass(frozen=True)
class GramMatrix:
    matrix: np.ndarray
    kernel: KernelSpec
    source_fingerprint: str

    @property
    def n(self):
        return self.matrix.shape[0]


def kernel_eval(spec, x, xp):
    x = np.asarray(x, dtype=np.float64).ravel()
    xp = np.asarray(xp, dtype=np.float64).ravel()
    if x.shape != xp.shape:
        raise ValueError(f"dimension mismatch: {x.shape[0]} vs {xp.shape[0]}")
    if spec.kind == "linear":
        return float(x @ xp)
    diff = x - xp
    return float(np.exp(-(diff @ diff) / (2.0 * spec.sigma**2)))


def cross_kernel(spec, A, B):
    """Kernel matrix between the columns of ``A`` (d, m) and ``B`` (d, p)."""
    A = as_finite_matrix(A, "A")
    B = as_finite_matrix(B, "B")
    if A.shape[0] != B.shape[0]:
        raise ValueError(f"dimension mismatch: {A.shape[0]} vs {B.shape[0]}")
    if spec.kind == "linear":
        return A.T @ B
    return np.exp(-cdist(A.T, B.T, "sqeuclidean") / (2.0 * spec.sigma**2))


def gram(spec, X):
    """Gram matrix of the columns of ``X`` (d, n); exactly symmetric."""
    X = as_finite_matrix(X, "X")
    n = X.shape[1]
    if n < 1:
        raise ValueError("need at least one sample")
    if spec.kind == "linear":
        K = X.T @ X
        upper = np.triu(K)
        K = upper + np.triu(K, 1).T
    else:
        sq = squareform(pdist(X.T, "sqeuclidean")) if n > 1 else np.zeros((1, 1))
        K = np.exp(-sq / (2.0 * spec.sigma**2))
    return GramMatrix(K, spec, fingerprint(X))


def kappa_bound(spec, X):
    """Empirical bound on K(x, x') over the sample; 1 for the RBF kernel."""
    if spec.kind == "rbf":
        return 1.0
    X = as_finite_matrix(X, "X")
    # |<x_i, x_j>| <= max_i ||x_i||^2 by Cauchy-Schwarz, attained on the diagonal
    return float(np.max(np.einsum("ij,ij->j", X, X)))
