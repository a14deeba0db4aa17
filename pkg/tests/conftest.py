import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

import blocklearn as bl

# one PASS/FAIL/SKIP line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def tiny_graph():
    """Undirected 6-node graph with two visible clusters."""
    edges = [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)]
    return bl.make_graph(6, edges, directed=False)


@pytest.fixture
def tiny_directed():
    edges = [(0, 1), (1, 0), (0, 2), (2, 3), (3, 3), (3, 0)]
    return bl.make_graph(4, edges, directed=True)


@pytest.fixture
def fast_chains():
    return bl.ChainConfig(num_chains=8, steps_per_chain=3000, burn_in=1000, seed=0)


@pytest.fixture(scope="session")
def karate():
    return bl.load_karate()


def random_graph(rng, n, directed=False, p=0.4):
    edges = []
    for u in range(n):
        for v in range(n):
            if v == u or (not directed and v < u):
                continue
            if rng.random() < p:
                edges.append((u, v))
    return bl.make_graph(n, edges, directed=directed, allow_self_loops=False)
