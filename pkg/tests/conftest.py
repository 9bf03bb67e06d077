import networkx as nx
import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qperc import hypercube as hc

# numba kernels compile on first call; keep hypothesis from timing that
settings.register_profile("qperc", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qperc")


def to_nx(g):
    """Independent networkx copy of a hypercube subgraph (edge list from raw masks)."""
    G = nx.Graph()
    G.add_nodes_from(range(g.n))
    for v in range(g.n):
        for i in range(g.d):
            if (int(g.open[v]) >> i) & 1:
                G.add_edge(v, v ^ (1 << i))
    return G


def graph_to_nx(graph):
    G = nx.Graph()
    G.add_nodes_from(int(x) for x in graph.labels)
    for u, v in graph.edges():
        G.add_edge(int(graph.labels[u]), int(graph.labels[v]))
    return G


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_subgraph(d, p, seed):
    return hc.generate(hc.GenerationParams(d, p, seed))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES
    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
