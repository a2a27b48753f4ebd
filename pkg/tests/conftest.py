import functools
import warnings

import numpy as np
import pytest

from ftconsensus.graph import Graph
from ftconsensus.scenario import builtin_scenarios, run_scenario

# Connection matrix of the six-agent network, row by row as printed.
SIX_AGENT_MATRIX = [
    [0, 1, 0, 0, 1, 1],
    [1, 0, 1, 0, 1, 0],
    [0, 1, 0, 1, 0, 0],
    [0, 0, 1, 0, 0, 0],
    [1, 1, 0, 0, 0, 0],
    [1, 0, 0, 0, 0, 0],
]


@functools.lru_cache(maxsize=None)
def run_builtin(name):
    """Each built-in example is simulated at most once per test session."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return run_scenario(builtin_scenarios()[name])


@pytest.fixture
def six_graph():
    return Graph(SIX_AGENT_MATRIX)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_graph(rng, n, p=0.5, connected=False):
    while True:
        w = np.triu(rng.uniform(0.2, 2.0, (n, n)) * (rng.random((n, n)) < p), 1)
        g = Graph(w + w.T)
        if not connected or n == 1:
            return g
        from ftconsensus.graph import is_connected

        if is_connected(g):
            return g


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[key])
