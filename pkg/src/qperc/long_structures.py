"""Diameters, long cycles and clique minors in percolation giants.

Cycle and minor searches are heuristics that return certificates; every
certificate is validated against the graph before it is handed back, so a
weak search can under-report but never over-report.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import CapExceededError, DisconnectedError
from .graph import as_graph, bfs_dist, is_connected, two_core
from .hypercube import derive_seed

ALL_BFS_CAP = 1 << 16


# ---------------------------------------------------------------------------
# diameter


@dataclass(frozen=True)
class DiameterResult:
    value: int
    method: str
    endpoints: tuple = ()
    bfs_calls: int = 0


@njit(cache=True)
def _all_bfs_diameter(indptr, indices):
    m = indptr.size - 1
    best, a, b = 0, 0, 0
    for s in range(m):
        dist = bfs_dist(indptr, indices, s)
        for v in range(m):
            if dist[v] > best:
                best, a, b = dist[v], s, v
    return best, a, b


@njit(cache=True)
def _argmax_first(x):
    k = 0
    for i in range(x.size):
        if x[i] > x[k]:
            k = i
    return k


@njit(cache=True)
def _ifub(indptr, indices, start):
    """Exact diameter by iterative fringe upper bounding from ``start``."""
    m = indptr.size - 1
    calls = 0
    # 4-sweep style centre: double sweep, then the midpoint of that path
    d0 = bfs_dist(indptr, indices, start)
    a = _argmax_first(d0)
    da = bfs_dist(indptr, indices, a)
    b = _argmax_first(da)
    db = bfs_dist(indptr, indices, b)
    calls += 3
    lb = da[b]
    ea, eb = a, b
    half = lb // 2
    u = b
    for v in range(m):
        if da[v] + db[v] == lb and da[v] == half:
            u = v
            break
    du = bfs_dist(indptr, indices, u)
    calls += 1
    ecc_u = du.max()
    if ecc_u > lb:
        lb = ecc_u
        ea, eb = u, _argmax_first(du)
    ub = 2 * ecc_u
    order = np.argsort(-du, kind="mergesort")
    i = ecc_u
    k = 0
    while ub > lb and i > 0:
        level_best = 0
        while k < m and du[order[k]] == i:
            v = order[k]
            dv = bfs_dist(indptr, indices, v)
            calls += 1
            w = _argmax_first(dv)
            if dv[w] > level_best:
                level_best = dv[w]
            if dv[w] > lb:
                lb = dv[w]
                ea, eb = v, w
            k += 1
        if lb > 2 * (i - 1):
            break
        ub = 2 * (i - 1)
        i -= 1
    return lb, ea, eb, calls


def diameter(g, component=None, mode: str = "ifub") -> DiameterResult:
    """Diameter of a connected component: exact-all-bfs, ifub (exact) or double-sweep (lower)."""
    graph = as_graph(g, component)
    if not is_connected(graph):
        raise DisconnectedError("diameter needs a connected component")
    lab = graph.labels
    if mode == "exact-all-bfs":
        if graph.m > ALL_BFS_CAP:
            raise CapExceededError(f"all-pairs BFS capped at {ALL_BFS_CAP} vertices")
        val, a, b = _all_bfs_diameter(graph.indptr, graph.indices)
        return DiameterResult(int(val), mode, (int(lab[a]), int(lab[b])), graph.m)
    if mode == "ifub":
        val, a, b, calls = _ifub(graph.indptr, graph.indices, 0)
        return DiameterResult(int(val), mode, (int(lab[a]), int(lab[b])), int(calls))
    if mode in ("double-sweep", "double-sweep-lower"):
        d0 = bfs_dist(graph.indptr, graph.indices, 0)
        a = int(np.argmax(d0))
        da = bfs_dist(graph.indptr, graph.indices, a)
        b = int(np.argmax(da))
        return DiameterResult(int(da[b]), "double-sweep-lower", (int(lab[a]), int(lab[b])), 2)
    raise ValueError(f"unknown diameter mode {mode!r}")


# ---------------------------------------------------------------------------
# cycles


@dataclass(frozen=True)
class CycleCertificate:
    cycle: tuple = ()

    @property
    def length(self) -> int:
        return len(self.cycle)


def validate_cycle(g, cert: CycleCertificate) -> list[str]:
    graph = as_graph(g)
    if cert.length == 0:
        return []
    problems = []
    if cert.length < 3:
        problems.append("cycle shorter than 3")
    if len(set(cert.cycle)) != cert.length:
        problems.append("repeated vertex")
    try:
        loc = graph.local(cert.cycle)
    except ValueError as exc:
        return problems + [str(exc)]
    for x, y in zip(loc, np.roll(loc, -1)):
        if not graph.has_edge(int(x), int(y)):
            problems.append(f"non-edge ({graph.labels[x]}, {graph.labels[y]})")
    return problems


@njit(cache=True)
def _posa_search(indptr, indices, start, budget, seed):
    np.random.seed(seed)
    m = indptr.size - 1
    pos = np.full(m, -1, dtype=np.int64)
    path = np.empty(m, dtype=np.int64)
    best = np.empty(m, dtype=np.int64)
    best_len = 0
    path[0] = start
    pos[start] = 0
    L = 1
    for _ in range(budget):
        h = path[L - 1]
        nfree = 0
        for k in range(indptr[h], indptr[h + 1]):
            if pos[indices[k]] < 0:
                nfree += 1
        if nfree > 0:
            r = np.random.randint(nfree)
            for k in range(indptr[h], indptr[h + 1]):
                w = indices[k]
                if pos[w] < 0:
                    if r == 0:
                        path[L] = w
                        pos[w] = L
                        L += 1
                        break
                    r -= 1
            continue
        # head is stuck: record closing cycles, then rotate
        nrot = 0
        for k in range(indptr[h], indptr[h + 1]):
            j = pos[indices[k]]
            if j <= L - 3:
                nrot += 1
                if L - j > best_len:
                    best_len = L - j
                    best[:best_len] = path[j:L]
        if nrot == 0:
            # reverse the path and grow from the other end
            path[:L] = path[:L][::-1].copy()
            for t in range(L):
                pos[path[t]] = t
            continue
        r = np.random.randint(nrot)
        for k in range(indptr[h], indptr[h + 1]):
            j = pos[indices[k]]
            if j <= L - 3:
                if r == 0:
                    path[j + 1:L] = path[j + 1:L][::-1].copy()
                    for t in range(j + 1, L):
                        pos[path[t]] = t
                    break
                r -= 1
    return best[:best_len].copy()


def longest_cycle_heuristic(g, component=None, budget: int = 100_000, seed: int = 0,
                            restarts: int = 16) -> CycleCertificate:
    """Longest cycle found by rotation-extension path search on the 2-core."""
    graph = as_graph(g, component)
    core = two_core(graph)
    if len(core) < 3:
        return CycleCertificate()
    sub = graph.subgraph(core)
    best = ()
    for r in range(restarts):
        s = derive_seed(seed, r)
        start = int(np.random.default_rng(s).integers(sub.m))
        loc = _posa_search(sub.indptr, sub.indices, start, budget, s % (2 ** 31))
        cyc = tuple(int(x) for x in sub.labels[loc])
        if len(cyc) >= 3:
            k = cyc.index(min(cyc))
            cyc = cyc[k:] + cyc[:k]
            if (len(cyc), tuple(-x for x in cyc)) > (len(best), tuple(-x for x in best)):
                best = cyc
    cert = CycleCertificate(best)
    problems = validate_cycle(graph, cert)
    if problems:
        raise AssertionError(f"cycle search produced an invalid certificate: {problems}")
    return cert


def cycle_bound_from_expansion(k: int, t: int) -> int:
    """Guaranteed cycle length t + 1 when every W with k/2 <= |W| <= k has |N(W)| >= t."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if t < 2:
        raise ValueError("t must be >= 2")
    return t + 1


def minor_bound_from_separator(N: float, boundary: float, C: float) -> float:
    """Clique-minor order lower bound boundary / (C sqrt(N))."""
    if N <= 0 or boundary <= 0 or C <= 0:
        raise ValueError("inputs must be positive")
    return boundary / (C * math.sqrt(N))


# ---------------------------------------------------------------------------
# clique minors


@dataclass(frozen=True)
class MinorCertificate:
    branch_sets: tuple = ()

    @property
    def order(self) -> int:
        return len(self.branch_sets)


def validate_minor(g, cert: MinorCertificate) -> list[str]:
    """Disjoint, individually connected, pairwise adjacent branch sets."""
    graph = as_graph(g)
    index = {int(v): i for i, v in enumerate(graph.labels)}
    owner = np.full(graph.m, -1, dtype=np.int64)
    problems = []
    for k, bs in enumerate(cert.branch_sets):
        if len(bs) == 0:
            problems.append(f"branch set {k} empty")
        for v in bs:
            i = index.get(int(v))
            if i is None:
                problems.append(f"vertex {v} not in graph")
            elif owner[i] >= 0:
                problems.append(f"vertex {v} in two branch sets")
            else:
                owner[i] = k
    if problems:
        return problems
    t = cert.order
    touch = np.zeros((t, t), dtype=bool)
    for k, bs in enumerate(cert.branch_sets):
        loc = [index[int(v)] for v in bs]
        seen = {loc[0]}
        stack = [loc[0]]
        while stack:
            u = stack.pop()
            for w in graph.nbrs(u):
                w = int(w)
                o = owner[w]
                if o == k and w not in seen:
                    seen.add(w)
                    stack.append(w)
                elif o >= 0 and o != k:
                    touch[k, o] = True
        if len(seen) != len(loc):
            problems.append(f"branch set {k} not connected")
    for a in range(t):
        for b in range(a + 1, t):
            if not touch[a, b]:
                problems.append(f"branch sets {a} and {b} not adjacent")
    return problems


@njit(cache=True)
def _voronoi_cells(indptr, indices, seeds):
    """Multi-source BFS partition: every vertex joins the cell that reaches it first.

    Each cell is connected because a vertex inherits the cell of its BFS parent.
    """
    m = indptr.size - 1
    owner = np.full(m, -1, dtype=np.int64)
    queue = np.empty(m, dtype=np.int64)
    tail = 0
    for k in range(seeds.size):
        owner[seeds[k]] = k
        queue[tail] = seeds[k]
        tail += 1
    head = 0
    while head < tail:
        u = queue[head]
        head += 1
        for j in range(indptr[u], indptr[u + 1]):
            w = indices[j]
            if owner[w] < 0:
                owner[w] = owner[u]
                queue[tail] = w
                tail += 1
    return owner


def _max_clique(adj: list[int]) -> list[int]:
    """Maximum clique of a small graph given as neighbour bitmasks (pivoting Bron-Kerbosch)."""
    best = 0

    def expand(r, p, x):
        nonlocal best
        if p == 0 and x == 0:
            if r.bit_count() > best.bit_count():
                best = r
            return
        if r.bit_count() + p.bit_count() <= best.bit_count():
            return
        pivot = max(_bits(p | x), key=lambda u: (adj[u] & p).bit_count())
        for v in _bits(p & ~adj[pivot]):
            expand(r | 1 << v, p & adj[v], x & adj[v])
            p &= ~(1 << v)
            x |= 1 << v

    expand(0, (1 << len(adj)) - 1, 0)
    return _bits(best)


def _bits(x: int) -> list[int]:
    out = []
    while x:
        low = x & -x
        out.append(low.bit_length() - 1)
        x ^= low
    return out


def greedy_minor(g, component=None, target_t: int = 16, seed: int = 0,
                 restarts: int = 200) -> MinorCertificate:
    """Clique minor from BFS cluster growth on the 2-core.

    Each restart grows t connected clusters from random seeds by multi-source
    BFS (t drawn from [target_t / 2, 2 target_t]); the pairwise-adjacent
    clusters of a maximum clique in the cluster graph form a K-minor.  The
    largest family over all restarts (capped at ``target_t``, fewest vertices
    on ties) is validated and returned.
    """
    graph = as_graph(g, component)
    if graph.m == 0:
        return MinorCertificate()
    core = two_core(graph)
    work = graph.subgraph(core) if len(core) >= 3 else graph
    edges = work.edges()
    best = ()
    rng = np.random.default_rng(seed)
    lo = max(1, target_t // 2)
    for _ in range(restarts):
        t = int(min(work.m, rng.integers(lo, 2 * target_t + 1)))
        seeds = rng.choice(work.m, size=t, replace=False).astype(np.int64)
        owner = _voronoi_cells(work.indptr, work.indices, seeds)
        adj = [0] * t
        a, b = owner[edges[:, 0]], owner[edges[:, 1]]
        for x, y in set(zip(a[a != b].tolist(), b[a != b].tolist())):
            adj[x] |= 1 << y
            adj[y] |= 1 << x
        clique = _max_clique(adj)[:target_t]
        cand = tuple(sorted(tuple(sorted(int(v) for v in work.labels[owner == k])) for k in clique))
        if (len(cand), -sum(map(len, cand))) > (len(best), -sum(map(len, best))):
            best = cand
    cert = MinorCertificate(best)
    problems = validate_minor(graph, cert)
    if problems:
        raise AssertionError(f"minor search produced an invalid certificate: {problems}")
    return cert
