import numpy as np
import pytest

from netwf import WeightedNetwork


def random_undirected(v, seed, scale=1.0):
    rng = np.random.default_rng(seed)
    W = rng.normal(scale=scale, size=(v, v))
    W = np.triu(W, 1)
    W = W + W.T
    return WeightedNetwork(tuple(f"n{i}" for i in range(v)), W, directed=False)


def random_directed(v, seed):
    rng = np.random.default_rng(seed)
    W = rng.normal(size=(v, v))
    np.fill_diagonal(W, 0.0)
    return WeightedNetwork(tuple(f"n{i}" for i in range(v)), W, directed=True)


def random_sym_variances(v, seed):
    rng = np.random.default_rng(seed)
    V = rng.uniform(0.05, 0.6, size=(v, v))
    return 0.5 * (V + V.T)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
