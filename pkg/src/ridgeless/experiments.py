"""Seeded experiment drivers producing rectangular result tables.

Every trial draws from its own generator, ``SeedSequence(seed,
spawn_key=(grid_index, trial))``, so a trial's numbers do not depend on how
many trials run, in what order, or on how many threads.
"""

import csv
import json
import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .config import ConfigError
from .interpolants import general_linear_interpolant, min_norm_linear, null_space_component
from .kernels import KernelSpec, gram
from .loo import loo_pinv_kernel, rel_frobenius, zero_row_col
from .pinv import effective_condition_number, svd_pseudoinverse

log = logging.getLogger(__name__)


class ExperimentError(ValueError):
    pass


def trial_rng(seed, *key):
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key)))


def worker_count():
    raw = os.environ.get("RIDGELESS_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            log.warning("ignoring RIDGELESS_THREADS=%r", raw)
    return os.cpu_count() or 1


def ordered_map(fn, items, workers=None):
    """``[fn(x) for x in items]``, possibly threaded, always in input order."""
    items = list(items)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


@dataclass
class ResultTable:
    columns: list
    rows: list
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        width = len(self.columns)
        for r in self.rows:
            if len(r) != width:
                raise ValueError(f"row of length {len(r)} in a {width}-column table")

    def column(self, name):
        j = self.columns.index(name)
        return np.array([r[j] for r in self.rows])

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(self.columns)
            for r in self.rows:
                w.writerow([repr(float(x)) if isinstance(x, float) else x for x in r])

    def to_json(self, path):
        with open(path, "w") as fh:
            json.dump(
                {"columns": self.columns, "rows": self.rows, "metadata": self.metadata},
                fh,
                indent=2,
                default=float,
            )

    @classmethod
    def read_csv(cls, path):
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            columns = next(reader)
            rows = [[float(x) for x in r] for r in reader]
        return cls(columns, rows)


def _meta(cfg, name, started):
    return {
        "experiment": name,
        "config": cfg.to_dict(),
        "version": __version__,
        "wall_clock_s": time.perf_counter() - started,
    }


def mse(a, b):
    return float(np.mean((np.asarray(a) - np.asarray(b)) ** 2))


def _mse_trial(cfg, t):
    rng = trial_rng(cfg.seed, 0, t)
    X = rng.standard_normal((cfg.d, cfg.n))
    X_test = rng.standard_normal((cfg.d, cfg.n_test))
    w_true = rng.standard_normal(cfg.d)
    y, y_test = X.T @ w_true, X_test.T @ w_true
    F = svd_pseudoinverse(X)
    u = null_space_component(X, F.pinv, rng.standard_normal(cfg.d))
    u /= np.linalg.norm(u)
    train, test = [], []
    for r in cfg.v_grid:
        if r == 0:
            w = min_norm_linear(X, y, F).coefficients
        else:
            w = general_linear_interpolant(X, y, r * u, F).coefficients
        train.append(mse(X.T @ w, y))
        test.append(mse(X_test.T @ w, y_test))
    return train, test


def mse_vs_norm_trials(cfg, workers=None):
    """Train and test MSE per (trial, grid point), each shaped (trials, len(v_grid)).

    Noiseless linear data ``y = w^T x`` with Gaussian ``X`` and ``w``.  Each
    trial perturbs the minimum-norm solution along one random unit direction
    in the null space of ``X^T``, scaled to every norm in ``v_grid``.
    """
    if cfg.d <= cfg.n:
        raise ConfigError(f"need d > n for interpolation, got d={cfg.d}, n={cfg.n}")
    out = ordered_map(lambda t: _mse_trial(cfg, t), range(cfg.trials), workers)
    return np.array([o[0] for o in out]), np.array([o[1] for o in out])


def run_mse_vs_norm(cfg, workers=None):
    started = time.perf_counter()
    train, test = mse_vs_norm_trials(cfg, workers)
    rows = [
        [float(r), float(train[:, j].mean()), float(test[:, j].mean()), float(test[:, j].std())]
        for j, r in enumerate(cfg.v_grid)
    ]
    meta = _meta(cfg, "mse-vs-norm", started)
    meta["min_norm_best_trials"] = int(np.sum(np.all(test[:, :1] < test[:, 1:], axis=1)))
    meta["max_train_mse"] = float(train.max())
    return ResultTable(["v_norm", "train_mse_mean", "test_mse_mean", "test_mse_std"], rows, meta)


def _sweep(cfg, stat, workers):
    jobs = [(j, n, t) for j, n in enumerate(cfg.n_sweep) for t in range(cfg.trials)]
    vals = ordered_map(lambda job: stat(trial_rng(cfg.seed, job[0], job[2]), job[1]), jobs, workers)
    vals = np.array(vals).reshape(len(cfg.n_sweep), cfg.trials)
    return [
        [n, cfg.d, float(v.mean()), float(v.std())] for n, v in zip(cfg.n_sweep, vals)
    ]


def run_cond_double_descent(cfg, workers=None):
    """Effective condition number of RBF Gram matrices on N(0, 1) data."""
    if cfg.kernel.kind != "rbf":
        raise ExperimentError("cond-descent needs an rbf kernel")
    started = time.perf_counter()

    def stat(rng, n):
        X = rng.standard_normal((cfg.d, n))
        return effective_condition_number(svd_pseudoinverse(gram(cfg.kernel, X).matrix))

    rows = _sweep(cfg, stat, workers)
    return ResultTable(["n", "d", "cond_mean", "cond_std"], rows, _meta(cfg, "cond-descent", started))


def run_pinv_double_descent(cfg, workers=None):
    """Operator norm of ``X^+`` for Gaussian ``X`` of shape (d, n)."""
    started = time.perf_counter()

    def stat(rng, n):
        return svd_pseudoinverse(rng.standard_normal((cfg.d, n))).pinv_norm

    rows = _sweep(cfg, stat, workers)
    return ResultTable(["n", "d", "pinv_norm_mean", "pinv_norm_std"], rows, _meta(cfg, "pinv-descent", started))


def loo_sweep_closed_form(K, F):
    """All n leave-one-out pseudoinverses via the closed-form update (a generator)."""
    for i in range(K.shape[0]):
        yield loo_pinv_kernel(K, F, i, intermediates=False).pinv_loo


def run_loo_benchmark(cfg, tol=1e-8):
    """Wall-clock of a full LOO sweep: closed-form updates against per-index SVD.

    Each recomputed pseudoinverse is compared with the update outside the
    timed region; any disagreement above ``tol`` aborts the row.
    """
    started = time.perf_counter()
    kernel = cfg.kernel if cfg.kernel.kind == "rbf" else KernelSpec("rbf", 5.0)
    rows = []
    for j, n in enumerate(cfg.n_sweep):
        X = trial_rng(cfg.seed, j, 0).standard_normal((cfg.d, n))
        K = gram(kernel, X).matrix

        t0 = time.perf_counter()
        F = svd_pseudoinverse(K)
        if not F.full_rank:
            raise ExperimentError(f"Gram matrix at n={n} is rank {F.retained_rank}; benchmark needs full rank")
        for P in loo_sweep_closed_form(K, F):
            pass
        t_update = time.perf_counter() - t0

        t_recompute = 0.0
        worst = 0.0
        for i in range(n):
            t0 = time.perf_counter()
            ref = svd_pseudoinverse(zero_row_col(K, i)).pinv
            t_recompute += time.perf_counter() - t0
            upd = loo_pinv_kernel(K, F, i, intermediates=False)
            if upd.path != "closed_form":
                raise ExperimentError(f"n={n}, index {i}: update fell back to {upd.path}")
            worst = max(worst, rel_frobenius(upd.pinv_loo, ref))
        if worst > tol:
            raise ExperimentError(f"n={n}: update and SVD disagree (rel. Frobenius {worst:.2e})")
        rows.append([n, t_update, t_recompute, t_recompute / t_update, worst])
        log.info("n=%d update %.4fs recompute %.4fs", n, t_update, t_recompute)
    return ResultTable(
        ["n", "t_update", "t_recompute", "speedup", "max_rel_err"], rows, _meta(cfg, "loo-bench", started)
    )


def stability_dataset(cfg, t):
    """Gaussian inputs with labels from a random linear target plus N(0, 0.01) noise."""
    rng = trial_rng(cfg.seed, 0, t)
    X = rng.standard_normal((cfg.d, cfg.n))
    w = rng.standard_normal(cfg.d) / np.sqrt(cfg.d)
    y = X.T @ w + 0.1 * rng.standard_normal(cfg.n)
    return X, y


def run_stability_audit(cfg, workers=None):
    """CVloo audit over ``trials`` datasets.  Returns the table and the reports."""
    from .stability import average_bounds, cvloo_empirical

    started = time.perf_counter()
    kernel = cfg.kernel

    def one(t):
        X, y = stability_dataset(cfg, t)
        return cvloo_empirical(X, y, kernel=kernel if kernel.kind == "rbf" else None)

    reports = ordered_map(one, range(cfg.trials), workers)
    rows = [
        [t, r.cvloo_mean, r.lemma2_rhs_mean, r.B0, r.beta1_hat, r.beta2_hat, float(r.passed)]
        for t, r in enumerate(reports)
    ]
    meta = _meta(cfg, "stability-audit", started)
    meta["bounds"] = average_bounds([r.bounds for r in reports])
    meta["all_checks_passed"] = all(r.passed for r in reports)
    table = ResultTable(["trial", "cvloo_mean", "lemma2_rhs", "B0", "beta1", "beta2", "checks_passed"], rows, meta)
    return table, reports
