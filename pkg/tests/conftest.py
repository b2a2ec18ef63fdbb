import numpy as np
import pytest

from ridgeless.kernels import KernelSpec, gram


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def rbf_gram(rng, n, d=None):
    """Full-rank RBF Gram with condition number in the hundreds."""
    d = d or int(rng.integers(8, 31))
    X = rng.standard_normal((d, n))
    spec = KernelSpec("rbf", float(np.sqrt(d)))
    return gram(spec, X).matrix, X, spec


def duplicated_points(rng, d=5, n_unique=6, copies=2):
    base = rng.standard_normal((d, n_unique))
    return np.concatenate([base] * copies, axis=1)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
