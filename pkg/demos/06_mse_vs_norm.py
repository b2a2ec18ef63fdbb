"""Test error of interpolants as their distance from the min-norm solution grows."""

import numpy as np

from ridgeless.config import default_config
from ridgeless.experiments import run_mse_vs_norm

# %% Scaled-down run; the defaults (d=1000, n=200, 100 trials) take a few seconds
cfg = default_config("mse-vs-norm", d=300, n=60, trials=50)
t = run_mse_vs_norm(cfg)
for v, tr, te, sd in t.rows:
    print(f"||v||={v:6.1f}  train {tr:.1e}  test {te:9.1f} +- {sd:.1f}")
print("min-norm best in", t.metadata["min_norm_best_trials"], "of", cfg.trials, "trials")
print("ordering holds:", bool(np.all(np.diff(t.column("test_mse_mean")) > 0)))
