from itertools import combinations

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, strategies as st

from qperc import analytic as an
from qperc import components as cp
from qperc import decomposition as dc
from qperc import hypercube as hc
from qperc.errors import CapExceededError
from conftest import random_subgraph, to_nx


def _path(m):
    return dc.tree_from_edges(m, [(i, i + 1) for i in range(m - 1)])


def test_bfs_tree_q2():
    t = dc.bfs_spanning_tree(hc.full(2), [0, 1, 2, 3], 0)
    parent = {int(t.labels[i]): int(t.labels[t.parent[i]]) for i in range(4)}
    assert parent == {0: 0, 1: 0, 2: 0, 3: 1}
    single = dc.bfs_spanning_tree(hc.empty(3), [5], 5)
    assert single.size == 1


def test_path_of_ten():
    t = _path(10)
    dec = dc.tree_decompose(t, 3)
    assert sorted(dec.sizes, reverse=True) == [4, 3, 3]
    assert dc.verify_decomposition(t, dec) == []
    assert all(s <= 6 for s in dec.sizes)


def test_star():
    leaves = 6
    t = dc.tree_from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])
    dec = dc.tree_decompose(t, 2)
    assert dc.verify_decomposition(t, dec) == []
    assert all(2 <= s <= leaves * 2 for s in dec.sizes)


def test_whole_tree_one_piece():
    t = _path(5)
    dec = dc.tree_decompose(t, 5)
    assert dec.sizes == [5]
    with pytest.raises(ValueError):
        dc.tree_decompose(t, 6)


@given(st.integers(1, 400), st.integers(1, 30), st.integers(0, 10**6))
def test_random_trees_pass_checker(m, ell, seed):
    ell = min(ell, m)
    t = dc.random_labeled_tree(m, np.random.default_rng(seed))
    dec = dc.tree_decompose(t, ell)
    assert dc.verify_decomposition(t, dec) == []
    assert sorted(np.concatenate(dec.pieces).tolist()) == sorted(t.labels.tolist())


def test_checker_independently():
    # oracle: networkx checks partition, connectivity and diameter of each piece
    rng = np.random.default_rng(3)
    for _ in range(30):
        m = int(rng.integers(5, 120))
        t = dc.random_labeled_tree(m, rng)
        ell = int(rng.integers(1, m + 1))
        dec = dc.tree_decompose(t, ell)
        T = nx.Graph([(int(t.labels[i]), int(t.labels[t.parent[i]]))
                      for i in range(m) if i != t.root_index])
        T.add_nodes_from(t.labels.tolist())
        seen = set()
        for piece in dec.pieces:
            piece = set(piece.tolist())
            assert not piece & seen
            seen |= piece
            sub = T.subgraph(piece)
            assert nx.is_connected(sub)
            assert len(piece) >= ell
            assert nx.diameter(sub) <= 2 * ell
        assert seen == set(T.nodes)


def test_deterministic():
    t = dc.random_labeled_tree(300, np.random.default_rng(1))
    a, b = dc.tree_decompose(t, 7), dc.tree_decompose(t, 7)
    assert all(np.array_equal(x, y) for x, y in zip(a.pieces, b.pieces))


def test_checker_flags_bad_decomposition():
    t = _path(6)
    dec = dc.tree_decompose(t, 3)
    bad = dc.PieceDecomposition([np.array([0, 2, 4]), np.array([1, 3, 5])], 3, dec.c1,
                                dec.c2, dec.r)
    assert dc.verify_decomposition(t, bad)


def test_piece_family_full_cube():
    g = hc.full(6)
    dec = dc.piece_family(g, np.arange(64), 1, 1.0)
    assert dec.ell == 6
    assert sorted(np.concatenate(dec.pieces).tolist()) == list(range(64))
    with pytest.raises(ValueError):
        dc.piece_family(g, np.arange(64), 64, 1.0)


def test_piece_family_giant():
    g = random_subgraph(12, 1.5 / 12, 4)
    giant = cp.census(g).giant()
    dec = dc.piece_family(g, giant, len(giant) / 2, 1.0)
    tree = dc.bfs_spanning_tree(g, giant, int(giant.min()))
    assert dc.verify_decomposition(tree, dec) == []
    assert min(dec.sizes) >= dec.ell


def _subtree_oracle(g, v, k):
    # sum over connected k-subsets containing v of their spanning-tree counts
    G = to_nx(g)
    others = [u for u in range(g.n) if u != v]
    total = 0
    for rest in combinations(others, k - 1):
        S = G.subgraph((v,) + rest)
        if k == 1:
            total += 1
        elif nx.is_connected(S):
            total += round(nx.number_of_spanning_trees(S))
    return total


def test_rooted_subtrees_small():
    g = hc.full(3)
    assert [dc.enumerate_rooted_subtrees(g, 0, k) for k in (1, 2, 3)] == [1, 3, 9]
    for k in range(1, 6):
        assert dc.enumerate_rooted_subtrees(g, 5, k) == _subtree_oracle(g, 5, k)


def test_rooted_subtrees_random_and_bound():
    g = random_subgraph(4, 0.6, 7)
    for k in range(1, 6):
        c = dc.enumerate_rooted_subtrees(g, 0, k)
        assert c == _subtree_oracle(g, 0, k)
        assert c <= an.tree_count_bound(max(1, int(g.degrees().max())), k) * (1 + 1e-9)
    with pytest.raises(CapExceededError):
        dc.enumerate_rooted_subtrees(hc.full(8), 0, 3)
