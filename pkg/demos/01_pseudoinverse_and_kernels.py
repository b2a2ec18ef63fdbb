"""Truncated-SVD pseudoinverse and RBF Gram matrices."""

import numpy as np

from ridgeless import KernelSpec, effective_condition_number, gram, kappa_bound, svd_pseudoinverse
from ridgeless.selftest import penrose_residuals

rng = np.random.default_rng(0)

# %% A rank-3 matrix: three singular values survive the default cutoff
A = rng.standard_normal((8, 3)) @ rng.standard_normal((3, 6))
F = svd_pseudoinverse(A)
print("singular values:", np.round(F.singular_values, 12))
print("retained rank:", F.retained_rank, " cutoff:", F.truncation_threshold)
print("Penrose residuals:", ["%.1e" % r for r in penrose_residuals(A, F.pinv)])

# %% RBF Gram on distinct points is full rank; its conditioning depends on sigma
X = rng.standard_normal((15, 30))
for sigma in (1.0, 5.0, 20.0):
    K = gram(KernelSpec("rbf", sigma), X).matrix
    G = svd_pseudoinverse(K)
    print(f"sigma={sigma:5.1f}  rank={G.retained_rank}  cond={effective_condition_number(G):.3g}")

# %% kappa: 1 for the RBF kernel, the largest |<x_i, x_j>| for the linear one
print("kappa rbf:", kappa_bound(KernelSpec("rbf", 5.0), X))
print("kappa linear:", kappa_bound(KernelSpec("linear"), X))
