"""Quick invariant suite run by ``ridgeless selftest``."""

import numpy as np

from .kernels import KernelSpec, gram
from .loo import (
    loo_pinv_kernel,
    loo_pinv_linear,
    loo_pinv_svd,
    loo_pinv_two_step,
    projector_identities,
    rel_frobenius,
    zero_col,
)
from .pinv import svd_pseudoinverse
from .stability import cvloo_empirical


def penrose_residuals(A, P):
    """Relative Frobenius residuals of the four Moore-Penrose conditions."""
    def rel(X, Y):
        return np.linalg.norm(X - Y) / max(np.linalg.norm(Y), 1.0)

    AP, PA = A @ P, P @ A
    return (
        rel(AP @ A, A),
        rel(PA @ P, P),
        rel(AP.T, AP),
        rel(PA.T, PA),
    )


def random_matrix(rng, max_dim=40, rank_deficient=False):
    m, n = rng.integers(1, max_dim + 1, size=2)
    if rank_deficient and min(m, n) > 1:
        r = int(rng.integers(1, min(m, n)))
        return rng.standard_normal((m, r)) @ rng.standard_normal((r, n))
    return rng.standard_normal((m, n))


def well_conditioned_rbf(rng, n):
    """RBF Gram on Gaussian data with bandwidth matched to the dimension."""
    d = int(rng.integers(8, 31))
    X = rng.standard_normal((d, n))
    return gram(KernelSpec("rbf", float(np.sqrt(d))), X).matrix


def check_penrose(rng, count=20, tol=1e-9):
    worst = 0.0
    for j in range(count):
        A = random_matrix(rng, rank_deficient=j % 2 == 1)
        worst = max(worst, *penrose_residuals(A, svd_pseudoinverse(A).pinv))
    return worst <= tol, f"max residual {worst:.2e}"


def check_loo_oracle(rng, count=5, tol=1e-8):
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(3, 41))
        K = well_conditioned_rbf(rng, n)
        F = svd_pseudoinverse(K)
        i = int(rng.integers(n))
        ref = loo_pinv_svd(K, i).pinv_loo
        worst = max(
            worst,
            rel_frobenius(loo_pinv_kernel(K, F, i).pinv_loo, ref),
            rel_frobenius(loo_pinv_two_step(K, F, i).pinv_loo, ref),
        )
        d = int(rng.integers(10, 61))
        X = rng.standard_normal((d, int(rng.integers(2, min(d, 30) + 1))))
        j = int(rng.integers(X.shape[1]))
        ref = svd_pseudoinverse(zero_col(X, j)).pinv
        worst = max(worst, rel_frobenius(loo_pinv_linear(X, svd_pseudoinverse(X), j).pinv_loo, ref))
    return worst <= tol, f"max rel. Frobenius error {worst:.2e}"


def check_projectors(rng, count=5, tol=1e-8):
    worst = 0.0
    for _ in range(count):
        n = int(rng.integers(3, 41))
        K = well_conditioned_rbf(rng, n)
        rep = projector_identities(K, svd_pseudoinverse(K), int(rng.integers(n)), "kernel", tol)
        worst = max(worst, *rep.residuals.values())
        X = rng.standard_normal((40, 15))
        rep = projector_identities(X, svd_pseudoinverse(X), int(rng.integers(15)), "linear", tol)
        worst = max(worst, *rep.residuals.values())
    return worst <= tol, f"max residual {worst:.2e}"


def check_stability(rng, count=4):
    failed = []
    for j in range(count):
        d, n = int(rng.integers(5, 30)), int(rng.integers(3, 25))
        X = rng.standard_normal((d, n))
        y = rng.standard_normal(n)
        kernel = KernelSpec("rbf", float(np.sqrt(d))) if j % 2 == 0 else None
        rep = cvloo_empirical(X, y, kernel=kernel)
        if not rep.passed:
            failed.append(j)
    return not failed, f"failing datasets: {failed}" if failed else f"{count} datasets"


CHECKS = {
    "penrose": check_penrose,
    "loo_oracle": check_loo_oracle,
    "projector_identities": check_projectors,
    "stability_inequalities": check_stability,
}


def run_selftest(seed=0):
    """Run every check; returns a list of ``(name, passed, detail)``."""
    results = []
    for j, (name, fn) in enumerate(CHECKS.items()):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(j,)))
        try:
            ok, detail = fn(rng)
        except Exception as exc:  # a crash is a failed check, not a crashed CLI
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append((name, bool(ok), detail))
    return results
