"""Leave-one-out pseudoinverses by rank-one perturbation.

Removing sample ``i`` from a kernel problem zeroes row and column ``i`` of
the Gram matrix ``K``.  With ``a = -K[:, i]``, ``b = e_i`` and
``a_star = a + K[i, i] b`` this is the two-step update::

    K_star = K + a b^T          (column i zeroed)
    K_loo  = K_star + b a_star^T  (row i zeroed as well)

The first step falls under Meyer's Theorem 6 (``a`` in the column space,
``b`` in the row space, ``1 + b^T K^+ a = 0``), the second under Theorem 5
(``b`` outside the column space of ``K_star``).  For invertible ``K`` both
steps collapse to ``K_loo^+ = K^+ - h^T h / K^+_ii`` with ``h = K^+[i]``,
which costs O(n^2) instead of an O(n^3) SVD.

Linear problems zero column ``i`` of ``X`` (d, n): one Theorem-6 step with
``a = -x_i``.

Matrices stay full size (n x n, or d x n) with zeros in the removed slot,
and indices are 0-based.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .kernels import GramMatrix
from .pinv import PseudoinverseFactorization, operator_norm, svd_pseudoinverse

log = logging.getLogger(__name__)

BETA_TOL = 1e-8
MEMBERSHIP_TOL = 1e-8
NU_TOL = 1e-12
DIAG_TOL = 1e-12
PATHS = ("closed_form", "two_step_meyer", "svd_fallback")


class UpdatePreconditionError(ValueError):
    """A rank-one update formula does not apply to the given inputs."""


def _matrix(G):
    return G.matrix if isinstance(G, GramMatrix) else np.asarray(G, dtype=np.float64)


def _pinv_matrix(P):
    return P.pinv if isinstance(P, PseudoinverseFactorization) else np.asarray(P, dtype=np.float64)


def dagger(u):
    """Pseudoinverse of a vector, ``u^T / ||u||^2`` (zero for ``u = 0``)."""
    nrm2 = float(u @ u)
    return u / nrm2 if nrm2 > 0 else np.zeros_like(u)


def rel_frobenius(A, B):
    scale = max(np.linalg.norm(B), np.finfo(np.float64).tiny)
    return float(np.linalg.norm(A - B) / scale)


def zero_row_col(K, i):
    Z = np.array(K, dtype=np.float64, copy=True)
    Z[i, :] = 0.0
    Z[:, i] = 0.0
    return Z


def zero_col(X, i):
    Z = np.array(X, dtype=np.float64, copy=True)
    Z[:, i] = 0.0
    return Z


@dataclass(frozen=True)
class LooVectors:
    index: int
    a: np.ndarray
    b: np.ndarray
    a_star: np.ndarray

    def column_zeroed(self, K):
        return K + np.outer(self.a, self.b)

    def reconstruct(self, K):
        return self.column_zeroed(K) + np.outer(self.b, self.a_star)


def build_loo_vectors(G, i):
    K = _matrix(G)
    n = K.shape[0]
    if not 0 <= i < n:
        raise IndexError(f"index {i} out of range for n={n}")
    b = np.zeros(n)
    b[i] = 1.0
    a = -K[:, i].copy()
    return LooVectors(i, a, b, a + K[i, i] * b)


@dataclass
class LooUpdateResult:
    """Leave-one-out pseudoinverse together with the update intermediates."""

    pinv_loo: np.ndarray
    path: str
    index: int
    k: Optional[np.ndarray] = None
    h: Optional[np.ndarray] = None
    meyer_d: Optional[np.ndarray] = None
    meyer_e: Optional[np.ndarray] = None
    meyer_f: Optional[np.ndarray] = None
    meyer_lambda: float = float("nan")
    meyer_phi: float = float("nan")
    meyer_eta: float = float("nan")
    meyer_nu: float = float("nan")
    diagnostics: dict = field(default_factory=dict)


def _in_range(M, Mpinv, u):
    """Residual of projecting ``u`` onto the column space of ``M``, relative to ``||u||``."""
    r = u - M @ (Mpinv @ u)
    return np.linalg.norm(r) / max(np.linalg.norm(u), np.finfo(np.float64).tiny)


def meyer_t6_update(M, Mpinv, a, b, check=True):
    """Pseudoinverse of ``M + a b^T`` when ``a`` is in ``col(M)``, ``b`` in ``row(M)``
    and ``beta = 1 + b^T M^+ a`` vanishes.

    Returns ``(pinv, k, h)`` with ``k = M^+ a`` and ``h = b^T M^+``.
    """
    M = _matrix(M)
    P = _pinv_matrix(Mpinv)
    k = P @ a
    h = b @ P
    if check:
        beta = 1.0 + b @ k
        if abs(beta) > BETA_TOL:
            raise UpdatePreconditionError(f"beta = {beta:.3e} is not zero")
        if _in_range(M, P, a) > MEMBERSHIP_TOL:
            raise UpdatePreconditionError("a is not in the column space")
        if _in_range(M.T, P.T, b) > MEMBERSHIP_TOL:
            raise UpdatePreconditionError("b is not in the row space")
    kd, hd = dagger(k), dagger(h)
    Ph = P @ hd
    out = (
        P
        - np.outer(k, kd @ P)
        - np.outer(Ph, h)
        + (kd @ Ph) * np.outer(k, h)
    )
    return out, k, h


def meyer_t5_update(Kstar, Kstar_pinv, a_star, b, check=True):
    """Pseudoinverse of ``K_star + b a_star^T`` when ``a_star`` lies in the row
    space of ``K_star`` and ``b`` does not lie in its column space.

    The intermediates are ``d = K_star^+ b``, ``e = (K_star^+)^T a_star``,
    ``f = (I - K_star K_star^+) b``, ``lam = 1 + a_star^T K_star^+ b``,
    ``phi = f^T f``, ``eta = e^T e`` and ``nu = lam^2 + eta phi``.
    """
    Ks = _matrix(Kstar)
    P = _pinv_matrix(Kstar_pinv)
    d = P @ b
    e = P.T @ a_star
    f = b - Ks @ d
    lam = 1.0 + a_star @ d
    phi = float(f @ f)
    eta = float(e @ e)
    nu = lam**2 + eta * phi
    if check:
        if _in_range(Ks.T, P.T, a_star) > MEMBERSHIP_TOL:
            raise UpdatePreconditionError("a_star is not in the row space")
        if np.sqrt(phi) <= MEMBERSHIP_TOL * np.linalg.norm(b):
            raise UpdatePreconditionError("b lies in the column space")
    if nu <= NU_TOL:
        raise UpdatePreconditionError(f"nu = {nu:.3e} is degenerate")

    Pe = P @ e
    out = (
        P
        - (phi * np.outer(Pe, e) + eta * np.outer(d, f)) / nu
        + (lam * np.outer(Pe, f) - lam * np.outer(d, e)) / nu
    )
    result = LooUpdateResult(
        pinv_loo=out,
        path="two_step_meyer",
        index=int(np.argmax(np.abs(b))),
        meyer_d=d,
        meyer_e=e,
        meyer_f=f,
        meyer_lambda=float(lam),
        meyer_phi=phi,
        meyer_eta=eta,
        meyer_nu=float(nu),
    )
    if abs(lam) > NU_TOL:
        # shortened form, valid when phi = lam and eta = 1 - lam
        short = P - (np.outer(Pe, e - f) + np.outer(d, e - f) + np.outer(d, f) / lam)
        result.diagnostics["short_form_rel_err"] = rel_frobenius(short, out)
    return result


def loo_pinv_svd(G, i):
    """Reference path: SVD of the matrix with row and column ``i`` zeroed."""
    K = _matrix(G)
    return LooUpdateResult(svd_pseudoinverse(zero_row_col(K, i)).pinv, "svd_fallback", i)


def loo_pinv_two_step(G, Kpinv, i):
    """Theorem 6 followed by Theorem 5, keeping every intermediate."""
    K = _matrix(G)
    vecs = build_loo_vectors(K, i)
    try:
        Ks_pinv, k, h = meyer_t6_update(K, Kpinv, vecs.a, vecs.b)
        Kstar = vecs.column_zeroed(K)
        res = meyer_t5_update(Kstar, Ks_pinv, vecs.a_star, vecs.b)
    except UpdatePreconditionError as exc:
        log.warning("two-step update for index %d falls back to SVD: %s", i, exc)
        return loo_pinv_svd(K, i)
    res.index = i
    res.k, res.h = k, h
    res.diagnostics["kstar_pinv"] = Ks_pinv
    return res


def closed_form_applies(Kpinv, i):
    if not isinstance(Kpinv, PseudoinverseFactorization):
        return True
    if not Kpinv.full_rank:
        return False
    return abs(Kpinv.pinv[i, i]) > DIAG_TOL * Kpinv.pinv_norm


def loo_pinv_kernel(G, Kpinv, i, intermediates=True):
    """``(K_loo)^+ = K^+ - h^T h / K^+_ii`` for invertible ``K``.

    Falls back to a direct SVD when ``K`` is rank deficient or ``K^+_ii`` is
    negligible.  With ``intermediates`` the Meyer quantities are filled from
    their reduced expressions at O(n^2) extra cost.
    """
    K = _matrix(G)
    n = K.shape[0]
    if not 0 <= i < n:
        raise IndexError(f"index {i} out of range for n={n}")
    if not closed_form_applies(Kpinv, i):
        log.warning("closed-form LOO update for index %d falls back to SVD", i)
        return loo_pinv_svd(K, i)
    P = _pinv_matrix(Kpinv)
    h = P[i].copy()
    pii = P[i, i]
    out = P - np.outer(h, h) / pii
    # exact zeros in the removed slot
    out[i, :] = 0.0
    out[:, i] = 0.0
    res = LooUpdateResult(out, "closed_form", i, h=h)
    if intermediates:
        b = np.zeros(n)
        b[i] = 1.0
        k = -(P @ K[:, i])
        hh = h * (h[i] / (h @ h))  # h^dagger h b
        lam = float(hh[i])
        res.k = k
        res.meyer_d = P @ (b - hh)
        res.meyer_e = hh - b
        res.meyer_f = hh
        res.meyer_lambda = lam
        res.meyer_phi = float(hh @ hh)
        res.meyer_eta = float((hh - b) @ (hh - b))
        res.meyer_nu = lam**2 + res.meyer_eta * res.meyer_phi
    return res


def loo_pinv_linear(X, Xpinv, i, check_bound=True):
    """Pseudoinverse of ``X`` with column ``i`` zeroed, via one Theorem-6 step.

    Requires ``rank(X) = n``.  With ``check_bound`` the operator-norm bound
    ``||X_i^+ - X^+|| <= ||X^+||`` is evaluated into ``diagnostics``.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[1]
    if not 0 <= i < n:
        raise IndexError(f"index {i} out of range for n={n}")
    F = Xpinv if isinstance(Xpinv, PseudoinverseFactorization) else None
    P = _pinv_matrix(Xpinv)
    b = np.zeros(n)
    b[i] = 1.0
    a = -X[:, i]
    res = None
    if F is None or F.retained_rank == n:
        try:
            out, k, h = meyer_t6_update(X, P, a, b)
            out[i, :] = 0.0
            res = LooUpdateResult(out, "closed_form", i, k=k, h=h)
        except UpdatePreconditionError as exc:
            log.warning("linear LOO update for index %d falls back to SVD: %s", i, exc)
    if res is None:
        if F is not None and F.retained_rank < n:
            log.debug("X has rank %d < n = %d; linear LOO index %d uses SVD", F.retained_rank, n, i)
        res = LooUpdateResult(svd_pseudoinverse(zero_col(X, i)).pinv, "svd_fallback", i)
    if check_bound:
        lhs = operator_norm(res.pinv_loo - P)
        rhs = F.pinv_norm if F is not None else operator_norm(P)
        res.diagnostics["norm_diff"] = lhs
        res.diagnostics["norm_bound"] = rhs
        res.diagnostics["norm_bound_ok"] = bool(lhs <= rhs * (1 + 1e-10))
    return res


@dataclass
class ProjectorReport:
    residuals: dict
    tol: float = 1e-8

    @property
    def passed(self):
        return all(r <= self.tol for r in self.residuals.values())


def projector_identities(M, Mpinv, i, kind="kernel", tol=1e-8):
    """Residual Frobenius norms of the projector identities behind the updates.

    Kernel: ``K*^+ K* = K^+ K - k k^+``, ``K_loo^+ K_loo = K*^+ K*`` and their
    consequence ``K^+ K - K_loo^+ K_loo = k k^+``.  Linear:
    ``X_i X_i^+ = X X^+ - h^+ h``.
    """
    M = _matrix(M)
    P = _pinv_matrix(Mpinv)
    if kind == "kernel":
        vecs = build_loo_vectors(M, i)
        Ks_pinv, k, _ = meyer_t6_update(M, P, vecs.a, vecs.b, check=False)
        Kstar = vecs.column_zeroed(M)
        loo = meyer_t5_update(Kstar, Ks_pinv, vecs.a_star, vecs.b, check=False).pinv_loo
        Kloo = zero_row_col(M, i)
        kk = np.outer(k, dagger(k))
        res = {
            "kstar_projector": np.linalg.norm(Ks_pinv @ Kstar - (P @ M - kk)),
            "loo_projector": np.linalg.norm(loo @ Kloo - Ks_pinv @ Kstar),
            "projector_drop": np.linalg.norm(P @ M - loo @ Kloo - kk),
        }
    elif kind == "linear":
        n = M.shape[1]
        b = np.zeros(n)
        b[i] = 1.0
        loo, _, h = meyer_t6_update(M, P, -M[:, i], b, check=False)
        Xi = zero_col(M, i)
        res = {
            "column_projector": np.linalg.norm(Xi @ loo - (M @ P - np.outer(dagger(h), h))),
        }
    else:
        raise ValueError(f"kind must be 'kernel' or 'linear', got {kind!r}")
    return ProjectorReport({k_: float(v) for k_, v in res.items()}, tol)
