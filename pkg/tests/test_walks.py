import math
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from qperc import components as cp
from qperc import expansion as ex
from qperc import hypercube as hc
from qperc import walks as wk
from qperc.errors import CapExceededError, DisconnectedError
from qperc.graph import Graph, as_graph
from conftest import random_subgraph

K2 = Graph.from_edges(2, [(0, 1)])
C4 = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
STAR = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])


def _dense_tmix(graph, eps=0.25, max_t=10**5):
    # oracle: dense lazy matrix powers from every start
    A = np.zeros((graph.m, graph.m))
    for u, v in graph.edges():
        A[u, v] = A[v, u] = 1
    deg = A.sum(1)
    P = 0.5 * (np.eye(graph.m) + A / deg[:, None])
    pi = deg / deg.sum()
    M = np.eye(graph.m)
    for t in range(max_t):
        if 0.5 * np.abs(M - pi).sum(1).max() <= eps:
            return t
        M = M @ P
    raise AssertionError("oracle did not mix")


def test_lazy_step_k2():
    x = wk.DistributionVector.point([0, 1], 0)
    y = wk.lazy_step(K2, None, x)
    assert y.mass.tolist() == [0.5, 0.5]
    assert wk.lazy_step(K2, None, y).mass.tolist() == [0.5, 0.5]


@given(st.integers(4, 8), st.integers(0, 10**6))
def test_stationary_fixed_point(d, seed):
    g = random_subgraph(d, 2.0 / d, seed)
    giant = cp.census(g).giant()
    if len(giant) < 2:
        return
    pi = wk.stationary(g, giant)
    assert np.abs(wk.lazy_step(g, giant, pi).mass - pi.mass).sum() <= 1e-10
    deg = as_graph(g, giant).degrees()
    assert sum(Fraction(int(x), int(deg.sum())) for x in deg) == 1


def test_stationary_examples():
    assert wk.stationary(K2).mass.tolist() == [0.5, 0.5]
    pi = wk.stationary(STAR).mass
    assert pi[0] == pytest.approx(0.5) and np.allclose(pi[1:], 1 / 6)


def test_tv_examples():
    a = wk.DistributionVector([0, 1], [0.5, 0.5])
    b = wk.DistributionVector([0, 1], [0.75, 0.25])
    assert wk.tv_distance(a, a) == 0
    assert wk.tv_distance(a, b) == 0.25
    assert wk.tv_distance(wk.DistributionVector.point([0, 1], 0),
                          wk.DistributionVector.point([0, 1], 1)) == 1
    with pytest.raises(ValueError):
        wk.DistributionVector([0, 1], [0.5, 0.6])


def test_mixing_examples():
    assert wk.mixing_time_exact(K2).t_mix == 1
    assert wk.mixing_time_exact(C4).t_mix == _dense_tmix(C4)
    assert wk.mixing_time_exact(C4, eps=1.0).t_mix == 0


@pytest.mark.parametrize("seed", range(6))
def test_mixing_vs_dense_oracle(seed):
    g = random_subgraph(8, 1.6 / 8, seed)
    giant = cp.census(g).giant()
    graph = as_graph(g, giant)
    assert wk.mixing_time_exact(g, giant).t_mix == _dense_tmix(graph)


def test_binary_lifting_matches_stepping():
    # a long path mixes slowly enough to exercise the lifting phase
    path = Graph.from_edges(40, [(i, i + 1) for i in range(39)])
    r = wk.mixing_time_exact(path)
    assert r.t_mix > wk.STEPWISE_STEPS
    assert r.t_mix == _dense_tmix(path)


def test_full_cube_matches_birth_death_chain():
    for d in (3, 5, 7):
        g = hc.full(d)
        assert wk.mixing_time_exact(g, np.arange(g.n)).t_mix == wk.hypercube_mixing_time(d)


def test_hamming_chain_is_distribution():
    x = wk.hamming_chain(10, 25)
    assert x.sum() == pytest.approx(1.0) and np.all(x >= 0)


def test_mixing_guards():
    with pytest.raises(CapExceededError):
        wk.mixing_time_exact(hc.full(13), np.arange(2 ** 13))
    two = Graph.from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(DisconnectedError):
        wk.mixing_time_exact(two)


def test_heuristic_mode_flagged():
    g = random_subgraph(10, 2.0 / 10, 1)
    giant = cp.census(g).giant()
    r = wk.mixing_time_exact(g, giant, all_starts_cap=16)
    assert r.lower_bound_mode
    full = wk.mixing_time_exact(g, giant)
    assert r.t_mix <= full.t_mix


def test_cheeger_bound_examples():
    assert wk.mixing_bound_cheeger(0.5, 0.5) == pytest.approx(8 * math.log(8))
    assert wk.mixing_bound_cheeger(0.25, 0.25) == pytest.approx(32 * math.log(16))
    with pytest.raises(ValueError):
        wk.mixing_bound_cheeger(0.0, 0.5)
    assert wk.pi_min_simplified(10) == 0.05


@pytest.mark.parametrize("seed", range(10))
def test_exact_mixing_below_cheeger_bound(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(3, 16))
    while True:
        edges = [(u, v) for u in range(m) for v in range(u + 1, m) if rng.random() < 0.3]
        graph = Graph.from_edges(m, edges)
        if nx.is_connected(nx.Graph(edges)) and len({x for e in edges for x in e}) == m:
            break
    phi = ex.cheeger_exact(graph)[0]
    t = wk.mixing_time_exact(graph).t_mix
    assert t <= wk.mixing_bound_cheeger(phi, wk.pi_min_exact(graph))


def test_sampled_horizon_zero():
    r = wk.sampled_mixing(hc.full(6), np.arange(64), 1000, 0, 0)
    assert not r.mixed and r.t_mix is None


def test_sampled_full_cube_within_factor_three():
    d = 10
    exact = wk.hypercube_mixing_time(d)
    r = wk.sampled_mixing(hc.full(d), np.arange(2 ** d), 20_000, 200, 3, start=0)
    assert r.mixed
    assert exact / 3 <= r.t_mix <= 3 * exact


def test_hamming_projection():
    labels = np.array([0, 1, 3, 7])
    out = wk.hamming_projection(labels, np.full(4, 0.25), 3)
    assert out.tolist() == [0.25, 0.25, 0.25, 0.25]
