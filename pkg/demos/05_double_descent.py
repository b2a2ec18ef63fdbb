"""Sweeping n past d: pseudoinverse norm of Gaussian X and RBF Gram conditioning."""

import numpy as np

from ridgeless.config import default_config
from ridgeless.experiments import run_cond_double_descent, run_pinv_double_descent

sweep = (3, 7, 11, 14, 15, 16, 20, 30, 45)

# %% ||X^+|| = 1 / sigma_min(X) blows up when X is square
t = run_pinv_double_descent(default_config("pinv-descent", n_sweep=sweep))
for n, m in zip(t.column("n"), t.column("pinv_norm_mean")):
    print(f"n={int(n):3d}  ||X^+|| {m:8.3f}  " + "#" * int(min(m, 60)))

# %% The RBF Gram on the same data: conditioning keeps growing with n
t = run_cond_double_descent(default_config("cond-descent", n_sweep=sweep))
for n, m in zip(t.column("n"), t.column("cond_mean")):
    print(f"n={int(n):3d}  cond(K) {m:10.1f}")
