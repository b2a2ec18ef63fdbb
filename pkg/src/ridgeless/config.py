"""Experiment configuration: flat ``key = value`` files with per-experiment defaults."""

from dataclasses import dataclass, field
from typing import Optional

from .kernels import KINDS, KernelSpec

KEYS = ("seed", "d", "n", "n_test", "trials", "kernel", "sigma", "v_grid", "n_sweep", "lambda")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    d: int = 1000
    n: int = 200
    n_test: int = 50
    trials: int = 100
    kernel: KernelSpec = field(default_factory=KernelSpec)
    v_grid: tuple = (0.0, 20.0, 40.0, 60.0, 80.0, 100.0)
    n_sweep: tuple = tuple(range(2, 46))
    lam: Optional[float] = None

    def __post_init__(self):
        for name in ("d", "n", "n_test", "trials"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        g = self.v_grid
        if not g or g[0] != 0 or any(b <= a for a, b in zip(g, g[1:])):
            raise ConfigError("v_grid must start at 0 and increase strictly")
        s = self.n_sweep
        if not s or s[0] < 1 or any(b <= a for a, b in zip(s, s[1:])):
            raise ConfigError("n_sweep must be positive and strictly increasing")
        if self.lam is not None and not self.lam > 0:
            raise ConfigError("lambda must be positive")

    def to_dict(self):
        out = {
            "seed": self.seed,
            "d": self.d,
            "n": self.n,
            "n_test": self.n_test,
            "trials": self.trials,
            **self.kernel.to_dict(),
            "v_grid": list(self.v_grid),
            "n_sweep": list(self.n_sweep),
        }
        if self.kernel.kind == "linear":
            out["sigma"] = None
        out["lambda"] = self.lam
        return out

    def to_text(self):
        """Serialize in the same ``key = value`` format :func:`parse_config` reads."""
        lines = []
        for k, v in self.to_dict().items():
            if v is None:
                continue
            if isinstance(v, list):
                v = ",".join(repr(x) for x in v)
            lines.append(f"{k} = {v}")
        return "\n".join(lines) + "\n"


# Experiment-specific defaults layered over the dataclass defaults.
# mse-vs-norm uses the dataclass defaults (d=1000, n=200, n_test=50, trials=100).
EXPERIMENT_DEFAULTS = {
    "mse-vs-norm": {},
    "cond-descent": {"d": 15, "trials": 20, "kernel": KernelSpec("rbf", 5.0)},
    "pinv-descent": {"d": 15, "trials": 20, "kernel": KernelSpec("linear")},
    "stability-audit": {"d": 20, "n": 30, "trials": 10, "kernel": KernelSpec("rbf", 5.0)},
    "loo-bench": {"d": 40, "trials": 1, "n_sweep": (3, 50, 100, 200, 400)},
    "selftest": {},
}


def default_config(experiment="mse-vs-norm", **overrides):
    base = dict(EXPERIMENT_DEFAULTS.get(experiment, {}))
    base.update(overrides)
    return ExperimentConfig(**base)


def _parse_value(key, raw):
    raw = raw.strip()
    try:
        if key in ("seed", "d", "n", "n_test", "trials"):
            return int(raw)
        if key in ("sigma", "lambda"):
            return float(raw)
        if key == "v_grid":
            return tuple(float(x) for x in raw.split(",") if x.strip())
        if key == "n_sweep":
            return tuple(int(x) for x in raw.split(",") if x.strip())
        if key == "kernel":
            if raw not in KINDS:
                raise ValueError(f"expected one of {KINDS}")
            return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {raw!r} ({exc})") from None
    raise ConfigError(f"unknown key {key!r}; valid keys: {', '.join(KEYS)}")


def _build(values, experiment):
    values = dict(values)
    kw = dict(EXPERIMENT_DEFAULTS.get(experiment, {}))
    base_kernel = kw.get("kernel", KernelSpec())
    kind = values.pop("kernel", base_kernel.kind)
    sigma = values.pop("sigma", base_kernel.sigma if base_kernel.kind == "rbf" else 5.0)
    if "lambda" in values:
        kw["lam"] = values.pop("lambda")
    kw.update(values)
    try:
        kw["kernel"] = KernelSpec(kind, sigma) if kind == "rbf" else KernelSpec("linear")
    except ValueError as exc:
        raise ConfigError(f"sigma: {exc}") from None
    try:
        return ExperimentConfig(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def parse_config(text, experiment="mse-vs-norm", overrides=None):
    """Parse ``key = value`` lines; ``#`` starts a comment.  ``overrides`` win."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}; valid keys: {', '.join(KEYS)}")
        try:
            values[key] = _parse_value(key, raw)
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
    for key, raw in (overrides or {}).items():
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}; valid keys: {', '.join(KEYS)}")
        values[key] = raw if not isinstance(raw, str) else _parse_value(key, raw)
    return _build(values, experiment)


def load_config(path=None, experiment="mse-vs-norm", overrides=None):
    text = ""
    if path is not None:
        with open(path) as fh:
            text = fh.read()
    return parse_config(text, experiment, overrides)

