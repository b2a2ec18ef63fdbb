import numpy as np
import pytest

from ridgeless.config import ConfigError, default_config
from ridgeless.experiments import (
    ResultTable,
    mse_vs_norm_trials,
    ordered_map,
    run_cond_double_descent,
    run_loo_benchmark,
    run_mse_vs_norm,
    run_pinv_double_descent,
    run_stability_audit,
    worker_count,
)
from ridgeless.interpolants import min_norm_linear
from ridgeless.kernels import KernelSpec
from ridgeless.pinv import svd_pseudoinverse


def small_mse(**kw):
    base = dict(d=120, n=30, n_test=20, trials=8, seed=5)
    base.update(kw)
    return default_config("mse-vs-norm", **base)


def test_mse_table_shape_and_ordering():
    t = run_mse_vs_norm(small_mse())
    assert t.columns == ["v_norm", "train_mse_mean", "test_mse_mean", "test_mse_std"]
    assert len(t.rows) == 6
    assert np.all(t.column("train_mse_mean") <= 1e-12)
    assert np.all(np.diff(t.column("test_mse_mean")) > 0)
    assert t.metadata["config"]["d"] == 120


def test_v_zero_row_is_min_norm():
    from ridgeless.experiments import trial_rng

    cfg = small_mse(trials=1)
    _, test = mse_vs_norm_trials(cfg)
    rng = trial_rng(cfg.seed, 0, 0)
    X = rng.standard_normal((cfg.d, cfg.n))
    Xt = rng.standard_normal((cfg.d, cfg.n_test))
    w = rng.standard_normal(cfg.d)
    w0 = min_norm_linear(X, X.T @ w).coefficients
    assert test[0, 0] == pytest.approx(np.mean((Xt.T @ (w0 - w)) ** 2), rel=1e-12)


def test_mse_requires_underdetermined():
    with pytest.raises(ConfigError):
        run_mse_vs_norm(small_mse(d=10, n=20))


def test_trials_independent_of_count_and_threads():
    a = mse_vs_norm_trials(small_mse(trials=3), workers=1)[1]
    b = mse_vs_norm_trials(small_mse(trials=6), workers=4)[1]
    np.testing.assert_array_equal(a, b[:3])


def test_determinism(tmp_path):
    cfg = small_mse()
    r1, r2 = run_mse_vs_norm(cfg, workers=1), run_mse_vs_norm(cfg, workers=3)
    assert r1.rows == r2.rows
    r1.to_csv(tmp_path / "a.csv")
    r2.to_csv(tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_csv_round_trip(tmp_path):
    t = ResultTable(["a", "b"], [[1, 0.1 + 0.2], [2, 1e-300]])
    t.to_csv(tmp_path / "t.csv")
    back = ResultTable.read_csv(tmp_path / "t.csv")
    assert back.columns == ["a", "b"] and back.rows == [[1.0, 0.1 + 0.2], [2.0, 1e-300]]
    with pytest.raises(ValueError):
        ResultTable(["a"], [[1, 2]])


def test_cond_sweep_single_point_and_determinism():
    cfg = default_config("cond-descent", n_sweep=(1, 3, 6), trials=3)
    t = run_cond_double_descent(cfg)
    assert t.column("cond_mean")[0] == 1.0
    assert t.rows == run_cond_double_descent(cfg).rows
    with pytest.raises(Exception):
        run_cond_double_descent(default_config("cond-descent", kernel=KernelSpec("linear")))


def test_pinv_sweep_matches_inverse_smallest_singular_value():
    from ridgeless.experiments import trial_rng

    cfg = default_config("pinv-descent", d=1, n_sweep=(1,), trials=4)
    t = run_pinv_double_descent(cfg)
    xs = [trial_rng(cfg.seed, 0, k).standard_normal((1, 1))[0, 0] for k in range(4)]
    assert t.column("pinv_norm_mean")[0] == pytest.approx(np.mean([1 / abs(x) for x in xs]))
    X = trial_rng(0, 0, 0).standard_normal((15, 10))
    assert svd_pseudoinverse(X).pinv_norm == pytest.approx(1 / np.linalg.svd(X, compute_uv=False)[-1])


def test_pinv_sweep_peaks_at_square():
    cfg = default_config("pinv-descent", n_sweep=(7, 15, 30))
    m = run_pinv_double_descent(cfg).column("pinv_norm_mean")
    assert m[1] > m[0] and m[1] > m[2]


def test_loo_benchmark_small():
    t = run_loo_benchmark(default_config("loo-bench", n_sweep=(3, 60)))
    assert t.columns == ["n", "t_update", "t_recompute", "speedup", "max_rel_err"]
    assert t.column("n").tolist() == [3, 60]
    assert np.all(t.column("max_rel_err") <= 1e-8)


def test_stability_audit_small():
    table, reports = run_stability_audit(default_config("stability-audit", trials=3))
    assert len(reports) == 3 and all(r.passed for r in reports)
    assert table.metadata["all_checks_passed"]
    assert table.metadata["bounds"]["trials"] == 3


def test_ordered_map_and_workers(monkeypatch):
    assert ordered_map(lambda x: x * x, range(10), workers=4) == [x * x for x in range(10)]
    monkeypatch.setenv("RIDGELESS_THREADS", "2")
    assert worker_count() == 2
    monkeypatch.setenv("RIDGELESS_THREADS", "many")
    assert worker_count() >= 1
