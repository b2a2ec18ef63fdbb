"""Minimum-norm interpolants, perturbed interpolants, ridge and gradient descent."""

import numpy as np

from ridgeless import (
    KernelSpec,
    general_kernel_interpolant,
    general_linear_interpolant,
    gradient_descent_ls,
    gram,
    min_norm_kernel,
    min_norm_linear,
    predict,
    svd_pseudoinverse,
    tikhonov_kernel,
)

rng = np.random.default_rng(1)

# %% Linear, d > n: every interpolant fits the data, the min-norm one is shortest
X = rng.standard_normal((40, 10))
y = rng.standard_normal(10)
F = svd_pseudoinverse(X)
w = min_norm_linear(X, y, F).coefficients
print("min-norm ||w|| =", np.linalg.norm(w))
for scale in (1.0, 5.0):
    w_hat = general_linear_interpolant(X, y, scale * rng.standard_normal(40), F).coefficients
    print(f"  perturbed ||w|| = {np.linalg.norm(w_hat):.3f}, train residual {np.linalg.norm(X.T @ w_hat - y):.1e}")

# %% Gradient descent from zero lands on the min-norm solution
step = 0.9 * 2 / F.sigma_max**2
w_gd = gradient_descent_ls(X, y, step, 5000).coefficients
print("GD distance to min-norm:", np.linalg.norm(w_gd - w))

# %% Kernel: a perturbation in the null space of K changes c but not f
Xd = np.concatenate([X[:5, :6]] * 2, axis=1)  # repeated points, singular Gram
G = gram(KernelSpec("rbf", 2.0), Xd)
yd = rng.standard_normal(12)
Q = rng.standard_normal((5, 4))
c0 = min_norm_kernel(G, yd)
c1 = general_kernel_interpolant(G, yd, 10 * rng.standard_normal(12))
print("coefficient change:", np.linalg.norm(c1.coefficients - c0.coefficients))
print("prediction change: ", np.max(np.abs(predict(c1, Xd, Q) - predict(c0, Xd, Q))))

# %% Ridge solutions approach the min-norm interpolant as lambda shrinks
K = gram(KernelSpec("rbf", 5.0), X).matrix
c = min_norm_kernel(K, y).coefficients
for lam in (1e-1, 1e-4, 1e-8):
    gap = np.linalg.norm(tikhonov_kernel(K, y, lam).coefficients - c) / np.linalg.norm(c)
    print(f"lambda={lam:.0e}  relative gap {gap:.2e}")
