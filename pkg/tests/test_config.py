import pytest

from ridgeless.config import KEYS, ConfigError, ExperimentConfig, default_config, load_config, parse_config
from ridgeless.kernels import KernelSpec


def test_empty_file_gives_defaults(tmp_path):
    p = tmp_path / "empty.cfg"
    p.write_text("")
    assert load_config(p) == ExperimentConfig()
    assert load_config(p, "cond-descent") == default_config("cond-descent")


def test_defaults_are_large_scale_mse():
    cfg = ExperimentConfig()
    assert (cfg.d, cfg.n, cfg.n_test, cfg.trials) == (1000, 200, 50, 100)
    assert default_config("cond-descent").kernel == KernelSpec("rbf", 5.0)


def test_parse_values_and_comments():
    cfg = parse_config(
        "# a comment\nseed = 7\nd = 30   # trailing\nkernel = linear\nv_grid = 0, 1.5, 3\nn_sweep = 2,4,8\nlambda = 0.1\n"
    )
    assert cfg.seed == 7 and cfg.d == 30
    assert cfg.kernel == KernelSpec("linear")
    assert cfg.v_grid == (0.0, 1.5, 3.0)
    assert cfg.n_sweep == (2, 4, 8)
    assert cfg.lam == 0.1


def test_overrides_win():
    cfg = parse_config("d = 30\n", overrides={"d": "40", "sigma": 2.0})
    assert cfg.d == 40 and cfg.kernel.sigma == 2.0


def test_negative_sigma_names_field():
    with pytest.raises(ConfigError, match="sigma"):
        parse_config("sigma = -1\n")


def test_parse_error_has_line_number():
    with pytest.raises(ConfigError, match="line 2"):
        parse_config("d = 3\nthis line is broken\n")
    with pytest.raises(ConfigError, match="line 1"):
        parse_config("d = three\n")


def test_unknown_key_lists_valid_keys():
    with pytest.raises(ConfigError) as info:
        parse_config("colour = blue\n")
    for key in KEYS:
        assert key in str(info.value)


@pytest.mark.parametrize(
    "text",
    ["trials = 0", "v_grid = 1, 2", "v_grid = 0, 2, 1", "n_sweep = 3, 3", "lambda = -1", "seed = -4"],
)
def test_invariant_violations(text):
    with pytest.raises(ConfigError):
        parse_config(text)


@pytest.mark.parametrize("experiment", ["mse-vs-norm", "cond-descent", "pinv-descent", "stability-audit", "loo-bench"])
def test_text_round_trip(experiment):
    cfg = default_config(experiment, seed=11, lam=0.5)
    assert parse_config(cfg.to_text(), experiment) == cfg
