import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from qperc import hypercube as hc
from conftest import to_nx


def test_extreme_probabilities():
    g0 = hc.generate(hc.GenerationParams(6, 0.0, 1))
    assert not g0.open.any()
    g1 = hc.generate(hc.GenerationParams(6, 1.0, 1))
    assert np.all(g1.degrees() == 6)
    assert hc.edge_count(g1) == 64 * 6 // 2


def test_mean_edge_count_d10():
    # oracle: binomial mean n*d*p/2 and variance n*d*p(1-p)/2
    counts = np.array([hc.edge_count(hc.generate(hc.GenerationParams(10, 0.2, s)))
                       for s in range(1000)])
    N = 1024 * 10 // 2
    se = np.sqrt(N * 0.2 * 0.8 / len(counts))
    assert abs(counts.mean() - N * 0.2) <= 3 * se
    assert 0.8 < counts.var(ddof=1) / (N * 0.2 * 0.8) < 1.2


def test_sparse_path_matches_binomial():
    # p < 0.1 uses gap skipping; check the per-edge marginal is still p
    counts = np.array([hc.edge_count(hc.generate(hc.GenerationParams(9, 0.05, s)))
                       for s in range(400)])
    N = 512 * 9 // 2
    assert abs(counts.mean() - N * 0.05) <= 3 * np.sqrt(N * 0.05 * 0.95 / 400)


def test_edge_indicators_chi_square():
    # each canonical edge is open in about p of the trials
    d, p, trials = 6, 0.3, 600
    N = 64 * 6 // 2
    hits = np.zeros(N)
    for s in range(trials):
        g = hc.generate(hc.GenerationParams(d, p, s))
        for u, i in zip(*hc.canonical_edges(g)):
            hits[hc.edge_index(int(u), int(i), d)] += 1
    expected = trials * p
    chi2 = (((hits - expected) ** 2) / (trials * p * (1 - p))).sum()
    assert stats.chi2.sf(chi2, N) > 0.01


def test_generate_deterministic_and_seed_sensitive():
    a = hc.generate(hc.GenerationParams(8, 0.3, 7))
    b = hc.generate(hc.GenerationParams(8, 0.3, 7))
    c = hc.generate(hc.GenerationParams(8, 0.3, 8))
    assert a == b and a != c


@given(st.integers(2, 9), st.floats(0, 1), st.integers(0, 2**63))
def test_symmetry_invariant(d, p, seed):
    g = hc.generate(hc.GenerationParams(d, p, seed))
    assert hc.is_symmetric(g)
    assert hc.is_symmetric(hc.union_graphs(g, hc.generate(hc.GenerationParams(d, p, seed + 1))))


def test_sprinkle_split_examples():
    assert hc.sprinkle_split(0.5, 0.1) == pytest.approx(4 / 9, abs=1e-15)
    assert hc.sprinkle_split(0.37, 0.0) == 0.37
    assert hc.sprinkle_split(0.3, 0.3) == 0.0
    with pytest.raises(ValueError):
        hc.sprinkle_split(0.2, 0.3)


@given(st.floats(0, 0.999), st.floats(0, 1))
def test_sprinkle_identity(p, frac):
    q2 = p * frac
    q1 = hc.sprinkle_split(p, q2)
    assert abs((1 - q1) * (1 - q2) - (1 - p)) < 1e-12


def test_sprinkled_examples():
    q1, q2 = hc.generate_sprinkled(hc.GenerationParams(8, 0.3, 3, 0.0))
    assert q1 == q2
    _, q2 = hc.generate_sprinkled(hc.GenerationParams(5, 1.0, 3, 1.0))
    assert q2 == hc.full(5)


@given(st.integers(2, 9), st.floats(0.01, 0.99), st.floats(0, 1), st.integers(0, 10**9))
def test_sprinkled_nested(d, p, frac, seed):
    q1, q2 = hc.generate_sprinkled(hc.GenerationParams(d, p, seed, p * frac))
    assert hc.is_subgraph(q1, q2)


def test_neighbors_examples():
    assert sorted(hc.neighbors(hc.full(3), 0)) == [1, 2, 4]
    assert hc.neighbors(hc.empty(3), 5) == []
    # crafted: d=2, edges 00-01 and 01-11
    g = hc.from_edges(2, [(0, 1), (1, 3)])
    assert sorted(hc.neighbors(g, 1)) == [0, 3]
    assert hc.neighbors(g, 2) == []
    assert g.open.tolist() == [0b01, 0b11, 0b00, 0b10]


def test_union_degree_edge_count():
    g = hc.generate(hc.GenerationParams(7, 0.4, 2))
    assert hc.union_graphs(g, hc.empty(7)) == g
    assert hc.edge_count(hc.full(7)) == 128 * 7 // 2
    assert all(hc.degree(hc.full(7), v) == 7 for v in range(128))
    with pytest.raises(ValueError):
        hc.union_graphs(g, hc.empty(6))


def test_matches_networkx_copy():
    g = hc.generate(hc.GenerationParams(6, 0.5, 11))
    G = to_nx(g)
    assert G.number_of_edges() == hc.edge_count(g)
    assert [G.degree(v) for v in range(g.n)] == g.degrees().tolist()


def test_snapshot_roundtrip(tmp_path):
    g = hc.generate(hc.GenerationParams(9, 0.3, 5))
    path = tmp_path / "g.bin"
    hc.save_snapshot(g, path, seed=5)
    raw = path.read_bytes()
    assert raw[:4] == b"QPRC" and len(raw) == 16 + 4 * 512
    h, seed = hc.load_snapshot(path)
    assert h == g and seed == 5


def test_snapshot_rejects_garbage(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"NOPE" + bytes(40))
    with pytest.raises(ValueError):
        hc.load_snapshot(path)


def test_derive_seed_distinct():
    seeds = {hc.derive_seed(0, i) for i in range(10000)}
    assert len(seeds) == 10000


def test_dimension_cap():
    with pytest.raises(ValueError):
        hc.GenerationParams(31, 0.1)
