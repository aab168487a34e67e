import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from netemd import Graph

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def random_graph(n: int, p: float, rng: np.random.Generator, name: str = "") -> Graph:
    iu = np.triu_indices(n, k=1)
    keep = rng.random(len(iu[0])) < p
    return Graph.from_edges(n, np.column_stack([iu[0][keep], iu[1][keep]]), name)


def complete_graph(n: int) -> Graph:
    iu = np.triu_indices(n, k=1)
    return Graph.from_edges(n, np.column_stack(iu), f"K{n}")


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], f"P{n}")


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], f"C{n}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
