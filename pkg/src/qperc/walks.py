"""Lazy random walks: exact distribution evolution, mixing times and bounds.

The lazy walk stays put with probability 1/2 and otherwise moves to a
uniform open neighbour.  Exact mixing times evolve P^t(v, .) for every start
on components up to 2^9 vertices; up to 2^12 only a heuristic start set is
used (BFS diameter endpoints plus random starts), which gives a lower bound
on t_mix and is flagged as such.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from math import comb

import numpy as np
import scipy.sparse as sp

from .errors import CapExceededError, ConvergenceError, DisconnectedError
from .graph import Graph, as_graph, bfs_dist, is_connected

log = logging.getLogger(__name__)

ALL_STARTS_CAP = 1 << 9
EXACT_CAP = 1 << 12
HEURISTIC_RANDOM_STARTS = 8
STEPWISE_STEPS = 64


@dataclass
class DistributionVector:
    support: np.ndarray
    mass: np.ndarray

    def __post_init__(self):
        self.support = np.asarray(self.support, dtype=np.int64)
        self.mass = np.asarray(self.mass, dtype=float)
        if self.support.shape != self.mass.shape:
            raise ValueError("support and mass differ in length")
        if np.any(self.mass < 0) or abs(self.mass.sum() - 1.0) > 1e-12 * max(1, len(self.mass)):
            raise ValueError("mass must be a probability vector")

    @classmethod
    def point(cls, support, v: int) -> "DistributionVector":
        support = np.asarray(support, dtype=np.int64)
        mass = (support == v).astype(float)
        if mass.sum() != 1:
            raise ValueError(f"vertex {v} not in support")
        return cls(support, mass)


@dataclass
class MixingReport:
    t_mix: int | None
    tv_curve: np.ndarray
    method: str
    lower_bound_mode: bool = False
    starts: list = field(default_factory=list)
    margin: float = 0.0
    samples: list = field(default_factory=list)

    @property
    def mixed(self) -> bool:
        return self.t_mix is not None


def transition_matrix(graph: Graph) -> sp.csr_matrix:
    """Sparse lazy transition matrix P over local indices."""
    deg = graph.degrees()
    if np.any(deg == 0):
        raise ValueError("isolated vertex: lazy walk undefined")
    src = np.repeat(np.arange(graph.m), deg)
    vals = 0.5 / deg[src]
    P = sp.csr_matrix((vals, graph.indices, graph.indptr), shape=(graph.m, graph.m))
    return P + 0.5 * sp.identity(graph.m, format="csr")


def _aligned(graph: Graph, dist: DistributionVector) -> np.ndarray:
    if len(dist.support) != graph.m or np.any(dist.support != graph.labels):
        raise ValueError("distribution support does not match component")
    return dist.mass


def lazy_step(g, component, dist: DistributionVector) -> DistributionVector:
    graph = as_graph(g, component)
    x = _aligned(graph, dist)
    deg = graph.degrees()
    if np.any(deg[x > 0] == 0):
        raise ValueError("isolated vertex in support: lazy walk undefined")
    y = transition_matrix(graph).T @ x
    total = y.sum()
    if abs(total - 1.0) > 1e-15:
        log.debug("lazy_step mass drift %.3e renormalised", total - 1.0)
    return DistributionVector(graph.labels.copy(), y / total)


def stationary(g, component=None) -> DistributionVector:
    graph = as_graph(g, component)
    deg = graph.degrees().astype(float)
    if deg.sum() == 0:
        raise ValueError("component has no edges")
    return DistributionVector(graph.labels.copy(), deg / deg.sum())


def tv_distance(d1: DistributionVector, d2: DistributionVector) -> float:
    if len(d1.support) != len(d2.support) or np.any(d1.support != d2.support):
        raise ValueError("support mismatch")
    return 0.5 * float(np.abs(d1.mass - d2.mass).sum())


def _heuristic_starts(graph: Graph, rng) -> list[int]:
    a = int(np.argmax(bfs_dist(graph.indptr, graph.indices, 0)))
    b = int(np.argmax(bfs_dist(graph.indptr, graph.indices, a)))
    extra = rng.choice(graph.m, size=min(HEURISTIC_RANDOM_STARTS, graph.m), replace=False)
    return list(dict.fromkeys([a, b] + [int(x) for x in extra]))


def mixing_time_exact(g, component=None, eps: float = 0.25, seed: int = 0,
                      max_steps: int = 1_000_000, all_starts_cap: int = ALL_STARTS_CAP,
                      cap: int = EXACT_CAP) -> MixingReport:
    """min{t : max_v TV(P^t(v, .), pi) <= eps} by exact evolution.

    With every start tracked (m <= all_starts_cap) the worst-start distance
    d(t) is non-increasing, so after the first STEPWISE_STEPS single steps the
    crossing is located by binary lifting over dense powers P^(2^j).  With more
    vertices only diameter endpoints plus a few random starts are evolved step
    by step and the result is flagged as a lower bound.
    """
    graph = as_graph(g, component)
    if graph.m > cap:
        raise CapExceededError(f"exact mixing capped at {cap} vertices, got {graph.m}")
    if graph.num_edges == 0:
        raise ValueError("component has no edges")
    if not is_connected(graph):
        raise DisconnectedError("mixing time needs a connected component")
    pi = stationary(graph).mass
    heuristic = graph.m > all_starts_cap
    if heuristic:
        starts = _heuristic_starts(graph, np.random.default_rng(seed))
    else:
        starts = list(range(graph.m))
    M = np.zeros((len(starts), graph.m))
    M[np.arange(len(starts)), starts] = 1.0
    P = transition_matrix(graph)
    PT = P.T.tocsr()

    def dist_tv(X):
        return 0.5 * np.abs(X - pi).sum(axis=1).max()

    curve = []
    samples = []
    t = 0
    while True:
        tv = dist_tv(M)
        curve.append(tv)
        if tv <= eps:
            return MixingReport(t, np.array(curve), "exact", heuristic,
                                [int(graph.labels[s]) for s in starts])
        if t >= max_steps:
            raise ConvergenceError(f"not mixed after {max_steps} steps")
        if not heuristic and t >= STEPWISE_STEPS:
            break
        M = (PT @ M.T).T
        t += 1
    # all starts: d(t) is non-increasing, so binary lifting over P^(2^j) finds t_mix
    powers = [P.toarray()]
    while True:
        cand = M @ powers[-1]
        tv = dist_tv(cand)
        samples.append((t + 2 ** (len(powers) - 1), tv))
        if tv <= eps:
            break
        if 2 ** len(powers) > max_steps:
            raise ConvergenceError(f"not mixed after {max_steps} steps")
        powers.append(powers[-1] @ powers[-1])
    for j in range(len(powers) - 2, -1, -1):
        cand = M @ powers[j]
        tv = dist_tv(cand)
        samples.append((t + 2 ** j, tv))
        if tv > eps:
            M = cand
            t += 2 ** j
    rep = MixingReport(t + 1, np.array(curve), "exact", heuristic,
                       [int(graph.labels[s]) for s in starts])
    rep.samples = sorted(samples)
    return rep


def pi_min_exact(g, component=None) -> float:
    return float(stationary(g, component).mass.min())


def pi_min_simplified(n: int) -> float:
    """The lower bound 1/(2n) on pi_min, valid when |E| <= n."""
    return 1.0 / (2 * n)


def mixing_bound_cheeger(phi: float, pi_min: float) -> float:
    """(2 / phi^2) ln(4 / pi_min)."""
    if not 0 < phi <= 0.5:
        raise ValueError("phi must lie in (0, 1/2]")
    if not 0 < pi_min <= 1:
        raise ValueError("pi_min must lie in (0, 1]")
    return 2.0 / phi ** 2 * math.log(4.0 / pi_min)


def hamming_projection(labels: np.ndarray, mass: np.ndarray, d: int) -> np.ndarray:
    w = np.bitwise_count(np.asarray(labels, dtype=np.uint64)).astype(np.int64)
    return np.bincount(w, weights=mass, minlength=d + 1)


def sampled_mixing(g, component, walkers: int, horizon: int, seed: int, d: int | None = None,
                   start: int | None = None, eps: float = 0.25) -> MixingReport:
    """Monte-Carlo mixing estimate from the Hamming-weight projection.

    TV of the popcount distribution lower-bounds the full TV, so the curve
    estimates a lower bound on d(t).  The estimate is the first t with
    estimated projected TV <= eps - margin, margin ~ sqrt((d+1)/walkers)/2.
    """
    graph = as_graph(g, component)
    if d is None:
        d = getattr(g, "d", int(graph.labels.max()).bit_length())
    if not is_connected(graph):
        raise DisconnectedError("sampled mixing needs a connected component")
    rng = np.random.default_rng(seed)
    if start is None:
        far = bfs_dist(graph.indptr, graph.indices, 0)
        start = int(np.argmax(far))
    else:
        start = int(graph.local([start])[0])
    target = hamming_projection(graph.labels, stationary(graph).mass, d)
    weight = np.bitwise_count(graph.labels.astype(np.uint64)).astype(np.int64)
    margin = 0.5 * math.sqrt((d + 1) / walkers)
    deg = graph.degrees()
    pos = np.full(walkers, start, dtype=np.int64)
    curve = []
    t_est = None
    for t in range(horizon + 1):
        emp = np.bincount(weight[pos], minlength=d + 1) / walkers
        tv = 0.5 * float(np.abs(emp - target).sum())
        curve.append(tv)
        if tv <= eps - margin:
            t_est = t
            break
        if t == horizon:
            break
        move = rng.random(walkers) < 0.5
        k = (rng.random(walkers) * deg[pos]).astype(np.int64)
        nxt = graph.indices[graph.indptr[pos] + k]
        pos = np.where(move, nxt, pos)
    return MixingReport(t_est, np.array(curve), "sampled", True,
                        [int(graph.labels[start])], margin)


def hamming_chain(d: int, t: int) -> np.ndarray:
    """Exact Hamming-weight law after t lazy steps on the full cube from vertex 0."""
    k = np.arange(d + 1)
    up = (d - k) / (2 * d)
    down = k / (2 * d)
    x = np.zeros(d + 1)
    x[0] = 1.0
    for _ in range(t):
        y = 0.5 * x
        y[1:] += (x * up)[:-1]
        y[:-1] += (x * down)[1:]
        x = y
    return x


def hypercube_mixing_time(d: int, eps: float = 0.25, max_steps: int = 100_000) -> int:
    """Exact lazy-walk t_mix of the full Q^d via the birth-death chain on weight.

    By vertex transitivity every start is equivalent, and P^t(0, .) is uniform
    on each weight class, so TV equals TV of the weight laws.
    """
    target = np.array([comb(d, k) for k in range(d + 1)], dtype=float) / 2 ** d
    k = np.arange(d + 1)
    up = (d - k) / (2 * d)
    down = k / (2 * d)
    x = np.zeros(d + 1)
    x[0] = 1.0
    for t in range(max_steps + 1):
        if 0.5 * np.abs(x - target).sum() <= eps:
            return t
        y = 0.5 * x
        y[1:] += (x * up)[:-1]
        y[:-1] += (x * down)[1:]
        x = y
    raise ConvergenceError("birth-death chain did not mix")
