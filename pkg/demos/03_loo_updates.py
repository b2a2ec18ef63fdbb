"""Leave-one-out pseudoinverses from rank-one updates instead of fresh SVDs."""

import time

import numpy as np

from ridgeless import KernelSpec, gram, loo_pinv_kernel, loo_pinv_two_step, svd_pseudoinverse
from ridgeless.loo import loo_pinv_svd, rel_frobenius

rng = np.random.default_rng(2)
X = rng.standard_normal((20, 40))
K = gram(KernelSpec("rbf", np.sqrt(20)), X).matrix
F = svd_pseudoinverse(K)

# %% Three routes to the same matrix
i = 7
closed = loo_pinv_kernel(K, F, i)
two = loo_pinv_two_step(K, F, i)
ref = loo_pinv_svd(K, i).pinv_loo
print("closed form vs SVD:", rel_frobenius(closed.pinv_loo, ref))
print("two-step vs SVD:   ", rel_frobenius(two.pinv_loo, ref))

# %% The scalars of the second step collapse onto lambda for invertible K
print(f"lambda={two.meyer_lambda:.6f} phi={two.meyer_phi:.6f} eta+lambda={two.meyer_eta + two.meyer_lambda:.6f} nu={two.meyer_nu:.6f}")

# %% Timing a full sweep
t0 = time.perf_counter()
for j in range(K.shape[0]):
    loo_pinv_kernel(K, F, j, intermediates=False)
t_fast = time.perf_counter() - t0
t0 = time.perf_counter()
for j in range(K.shape[0]):
    loo_pinv_svd(K, j)
t_svd = time.perf_counter() - t0
print(f"sweep n=40: updates {t_fast * 1e3:.1f} ms, SVD {t_svd * 1e3:.1f} ms")
