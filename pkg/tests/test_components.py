from fractions import Fraction
from itertools import combinations

import networkx as nx
import numpy as np
from hypothesis import given, strategies as st

from qperc import components as cp
from qperc import hypercube as hc
from conftest import random_subgraph, to_nx


def test_census_trivial():
    c = cp.census(hc.empty(5))
    assert c.sizes.tolist() == [1] * 32
    assert cp.giant_fraction(c) == Fraction(1, 32)
    assert cp.second_largest_order(c) == 1
    c = cp.census(hc.full(5))
    assert c.sizes.tolist() == [32]
    assert cp.giant_fraction(c) == 1
    assert cp.second_largest_order(c) == 0


def test_census_crafted_d3():
    g = hc.from_edges(3, [(0b000, 0b001), (0b010, 0b110)])
    assert cp.census(g).sizes.tolist() == [2, 2, 1, 1, 1, 1]


@given(st.integers(2, 9), st.floats(0.05, 0.6), st.integers(0, 10**6))
def test_census_matches_networkx(d, p, seed):
    g = random_subgraph(d, p, seed)
    c = cp.census(g)
    oracle = sorted((len(x) for x in nx.connected_components(to_nx(g))), reverse=True)
    assert c.sizes.tolist() == oracle
    rng = np.random.default_rng(seed)
    G = to_nx(g)
    for u, v in rng.integers(0, g.n, size=(200, 2)):
        assert (c.label[u] == c.label[v]) == nx.has_path(G, int(u), int(v))


@given(st.integers(3, 8), st.floats(0.05, 0.5), st.integers(0, 10**6))
def test_adding_edges_never_shrinks_giant(d, p, seed):
    g = random_subgraph(d, p, seed)
    h = hc.union_graphs(g, random_subgraph(d, 0.05, seed + 1))
    assert cp.census(h).sizes[0] >= cp.census(g).sizes[0]
    assert Fraction(1, 2 ** d) <= cp.giant_fraction(cp.census(g)) <= 1


def test_attachment_identical_graphs():
    g = random_subgraph(8, 0.3, 1)
    assert cp.attachment_report(g, g).max_attachment == 0


def test_attachment_crafted_pendant():
    # giant = path 000-001-011-111 in Q1; piece {100,110} joins via sprinkled edge 110-111
    q1_edges = [(0, 1), (1, 3), (3, 7), (4, 6)]
    q1 = hc.from_edges(3, q1_edges)
    q2 = hc.from_edges(3, q1_edges + [(6, 7)])
    rep = cp.attachment_report(q1, q2)
    assert rep.max_attachment == 2
    assert not rep.skipped


@given(st.integers(5, 9), st.integers(0, 10**6))
def test_attachment_bounded_by_giant_growth(d, seed):
    q1, q2 = hc.generate_sprinkled(hc.GenerationParams(d, 1.5 / d, seed, 0.3 / d))
    rep = cp.attachment_report(q1, q2)
    if not rep.skipped:
        assert 0 <= rep.max_attachment <= rep.giant_gap


def test_two_hop_density_trivial():
    assert cp.two_hop_density(hc.full(6)) == 1 + 6 + 15
    # empty graph: giant is vertex 0 (smallest label); far vertices see nothing
    assert cp.two_hop_density(hc.empty(4)) == 0
    assert cp.two_hop_density(hc.empty(2)) == 1


def test_two_hop_density_bruteforce():
    g = random_subgraph(6, 0.25, 3)
    c = cp.census(g)
    giant = set(c.giant().tolist())
    oracle = min(sum(1 for u in giant if bin(u ^ v).count("1") <= 2) for v in range(g.n))
    assert cp.two_hop_density(g, c) == oracle


def test_five_hop_trivial():
    g = hc.full(8)
    assert cp.five_hop_boundary(g, np.arange(256), np.arange(256)) == 0
    from math import comb
    assert cp.five_hop_boundary(g, [0], np.arange(256)) == sum(comb(8, k) for k in range(1, 6))


def test_five_hop_floyd_warshall():
    g = random_subgraph(4, 0.6, 2)
    G = to_nx(g)
    dist = nx.floyd_warshall_numpy(G, nodelist=range(16))
    S = [0, 5]
    restrict = [v for v in range(16) if v % 3]
    oracle = sum(1 for v in restrict if v not in S and min(dist[s, v] for s in S) <= 5)
    assert cp.five_hop_boundary(g, S, restrict) == oracle
