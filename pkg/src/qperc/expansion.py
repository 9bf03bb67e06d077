"""Boundary and expansion measurements.

Exact quantities (Cheeger constant, vertex expansion) are computed by
exhaustive subset enumeration and are capped at ``EXACT_CAP`` vertices.  On
larger graphs the suite brackets the truth: the lazy-walk spectral gap
gives a lower bound on the bottleneck ratio, sweep cuts and sampled
connected sets give upper bounds.  A sampled minimum is never reported as
the true minimum.

Bottleneck ratio normalisation: Phi(S) = e(S, S^c) / (2 d_G(S)).
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from numba import njit

from . import analytic
from . import hypercube as hc
from .errors import CapExceededError, ConvergenceError, DisconnectedError
from .graph import Graph, as_graph, is_connected
from .hypercube import HypercubeSubgraph

EXACT_CAP = 22


# ---------------------------------------------------------------------------
# cuts


@dataclass(frozen=True)
class CutStats:
    set_size: int
    edge_boundary: int
    vertex_boundary: int
    total_degree: int
    inner_edges: int

    @property
    def bottleneck(self) -> float:
        if self.total_degree == 0:
            return math.nan
        return self.edge_boundary / (2 * self.total_degree)


def cut_stats(g, S) -> CutStats:
    """Exact boundary counts of S in g (hypercube subgraph or Graph)."""
    if isinstance(g, HypercubeSubgraph):
        inside = np.zeros(g.n, dtype=bool)
        inside[np.asarray(list(S), dtype=np.int64)] = True
        k = int(inside.sum())
        if k == 0 or k == g.n:
            raise ValueError("S must be nonempty and proper")
        verts = np.flatnonzero(inside)
        dirs = np.arange(g.d, dtype=np.int64)
        bits = ((g.open[verts][:, None].astype(np.int64) >> dirs) & 1).astype(bool)
        nb = verts[:, None] ^ (np.int64(1) << dirs)
        out = bits & ~inside[nb]
        e_out = int(out.sum())
        tot = int(bits.sum())
        vb = int(np.count_nonzero(hc.expand(g, inside) & ~inside))
    else:
        graph = g
        inside = np.zeros(graph.m, dtype=bool)
        inside[graph.local(S)] = True
        k = int(inside.sum())
        if k == 0 or k == graph.m:
            raise ValueError("S must be nonempty and proper")
        src = np.repeat(np.arange(graph.m), graph.degrees())
        from_s = inside[src]
        crossing = from_s & ~inside[graph.indices]
        e_out = int(crossing.sum())
        tot = int(graph.degrees()[inside].sum())
        vb = len(np.unique(graph.indices[crossing]))
    return CutStats(k, e_out, vb, tot, (tot - e_out) // 2)


def verify_harper(d: int, S) -> tuple[float, int, bool]:
    """Edge boundary of S in the full cube against |S| (d - log2 |S|)."""
    S = np.unique(np.asarray(list(S), dtype=np.int64))
    if len(S) > 1 << (d - 1):
        raise ValueError("|S| must be at most 2^(d-1)")
    bound = analytic.harper_bound(len(S), d)
    inside = np.zeros(1 << d, dtype=bool)
    inside[S] = True
    actual = 0
    for i in range(d):
        actual += int(np.count_nonzero(~inside[S ^ (1 << i)]))
    return bound, actual, actual >= bound - 1e-9


# ---------------------------------------------------------------------------
# exhaustive solvers


@njit(cache=True)
def _popcount(x):
    x = x - ((x >> 1) & 0x5555555555555555)
    x = (x & 0x3333333333333333) + ((x >> 2) & 0x3333333333333333)
    x = (x + (x >> 4)) & 0x0F0F0F0F0F0F0F0F
    return (x * 0x0101010101010101) >> 56 & 0xFF


@njit(cache=True)
def _lowbit_index(x):
    i = 0
    while not (x >> i) & 1:
        i += 1
    return i


@njit(cache=True)
def _cheeger_scan(nbmask, deg):
    m = nbmask.size
    total = 0
    for v in range(m):
        total += deg[v]
    full = 1 << m
    dsum = np.zeros(full, dtype=np.int32)
    inner = np.zeros(full, dtype=np.int32)
    best_num, best_den, best_set = -1, 1, 0
    for s in range(1, full):
        low = _lowbit_index(s)
        rest = s & (s - 1)
        dsum[s] = dsum[rest] + deg[low]
        inner[s] = inner[rest] + _popcount(nbmask[low] & rest)
        ds = dsum[s]
        if ds == 0 or 2 * ds > total:
            continue
        num = ds - 2 * inner[s]
        # compare num / (2 ds) with best_num / (2 best_den)
        if best_num < 0 or num * best_den < best_num * ds:
            best_num, best_den, best_set = num, ds, s
    return best_num, best_den, best_set


@njit(cache=True)
def _vertex_expansion_scan(nbmask):
    m = nbmask.size
    full = 1 << m
    union = np.zeros(full, dtype=np.int64)
    best_num, best_den, best_set = -1, 1, 0
    for s in range(1, full):
        low = _lowbit_index(s)
        union[s] = union[s & (s - 1)] | nbmask[low]
        k = _popcount(s)
        if 2 * k > m:
            continue
        num = _popcount(union[s] & ~s)
        if best_num < 0 or num * best_den < best_num * k:
            best_num, best_den, best_set = num, k, s
    return best_num, best_den, best_set


def _small_graph(g, component):
    graph = as_graph(g, component)
    if graph.m > EXACT_CAP:
        raise CapExceededError(f"exact solver capped at {EXACT_CAP} vertices, got {graph.m}")
    if graph.m < 2:
        raise ValueError("need at least two vertices")
    return graph


def _members(graph, bits):
    return sorted(int(graph.labels[i]) for i in range(graph.m) if (bits >> i) & 1)


def cheeger_exact(g, component=None):
    """Exact min Phi(S) over S with pi(S) <= 1/2; returns (phi, witness)."""
    graph = _small_graph(g, component)
    num, den, bits = _cheeger_scan(graph.adjacency_bitmasks(), graph.degrees().astype(np.int64))
    if num < 0:
        raise ValueError("graph has no edges")
    return num / (2 * den), _members(graph, bits)


def min_vertex_expansion_exact(g, component=None):
    """Exact min |N(S)|/|S| over nonempty S with |S| <= m/2; (ratio, witness)."""
    graph = _small_graph(g, component)
    num, den, bits = _vertex_expansion_scan(graph.adjacency_bitmasks())
    return num / den, _members(graph, bits)


# ---------------------------------------------------------------------------
# spectral bracket


@dataclass
class SpectralSummary:
    gap: float
    lambda2: float
    sweep_phi: float
    cheeger_lower: float
    cheeger_upper: float
    iterations: int
    residual: float
    sweep_set: list = field(default_factory=list, repr=False)

    @property
    def relaxation_time(self) -> float:
        return math.inf if self.gap <= 0 else 1.0 / self.gap


def lazy_operator(graph: Graph):
    """Symmetrised lazy walk operator (I + D^-1/2 A D^-1/2) / 2 as a sparse matrix."""
    deg = graph.degrees().astype(float)
    src = np.repeat(np.arange(graph.m), graph.degrees())
    inv = 1.0 / np.sqrt(deg)
    vals = 0.5 * inv[src] * inv[graph.indices]
    A = sp.csr_matrix((vals, graph.indices, graph.indptr), shape=(graph.m, graph.m))
    return A + 0.5 * sp.identity(graph.m, format="csr")


def lanczos_second(op, top, tol=1e-10, krylov_cap=300, max_restarts=50, seed=0):
    """Largest eigenpair of ``op`` on the orthogonal complement of ``top``.

    Lanczos with full reorthogonalisation.  A breakdown (invariant subspace)
    continues from a fresh random vector; hitting the Krylov cap restarts
    from the current Ritz vector.  Returns (theta, vector, iterations, residual).
    """
    m = op.shape[0]
    rng = np.random.default_rng(seed)
    top = top / np.linalg.norm(top)
    dim = m - 1
    if dim == 0:
        raise ValueError("need at least two vertices")

    def project(x):
        x = x - top * (top @ x)
        return x

    start = project(rng.standard_normal(m))
    total_iters = 0
    theta, vec, resid = 0.0, start, math.inf
    for _ in range(max_restarts + 1):
        cap = min(krylov_cap, dim)
        Q = np.zeros((cap, m))
        alpha = np.zeros(cap)
        beta = np.zeros(cap)
        q = start / np.linalg.norm(start)
        k = 0
        while True:
            Q[k] = q
            w = op @ q
            alpha[k] = q @ w
            for _ in range(2):
                w = project(w)
                w -= Q[:k + 1].T @ (Q[:k + 1] @ w)
            b = np.linalg.norm(w)
            total_iters += 1
            T = np.diag(alpha[:k + 1]) + np.diag(beta[:k], 1) + np.diag(beta[:k], -1)
            evals, evecs = np.linalg.eigh(T)
            theta = evals[-1]
            y = evecs[:, -1]
            vec = Q[:k + 1].T @ y
            resid = abs(b * y[-1])
            if resid <= tol or k + 1 == dim:
                return theta, vec / np.linalg.norm(vec), total_iters, (0.0 if k + 1 == dim else resid)
            if k + 1 == cap:
                break
            if b < 1e-12:
                # invariant subspace: continue in a fresh direction
                fresh = project(rng.standard_normal(m))
                for _ in range(2):
                    fresh -= Q[:k + 1].T @ (Q[:k + 1] @ fresh)
                    fresh = project(fresh)
                beta[k] = 0.0
                q = fresh / np.linalg.norm(fresh)
            else:
                beta[k] = b
                q = w / b
            k += 1
        start = vec
    raise ConvergenceError(f"Lanczos residual {resid:.3e} above tol {tol:.1e}")


def sweep_cut(graph: Graph, f: np.ndarray):
    """Best bottleneck ratio over prefix cuts of the ordering by f (descending)."""
    deg = graph.degrees().astype(np.int64)
    order = np.lexsort((np.arange(graph.m), -f))
    rank = np.empty(graph.m, dtype=np.int64)
    rank[order] = np.arange(graph.m)
    e = graph.edges()
    a = np.minimum(rank[e[:, 0]], rank[e[:, 1]])
    b = np.maximum(rank[e[:, 0]], rank[e[:, 1]])
    diff = np.zeros(graph.m + 1, dtype=np.int64)
    np.add.at(diff, a + 1, 1)
    np.add.at(diff, b + 1, -1)
    cut = np.cumsum(diff)[1:graph.m]          # cut size for prefix sizes 1..m-1
    dsum = np.cumsum(deg[order])[:graph.m - 1]
    total = deg.sum()
    side = np.minimum(dsum, total - dsum)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = np.where(side > 0, cut / (2.0 * side), np.inf)
    k = int(np.argmin(phi))
    prefix = order[:k + 1]
    if dsum[k] * 2 > total:
        prefix = order[k + 1:]
    return float(phi[k]), sorted(int(x) for x in graph.labels[prefix])


def spectral_summary(g, component=None, tol: float = 1e-10, krylov_cap: int = 300,
                     seed: int = 0) -> SpectralSummary:
    """Lazy-walk spectral gap with the Cheeger bracket gap/2 <= Phi <= min(sweep, sqrt(2 gap))."""
    graph = as_graph(g, component)
    if graph.m < 2:
        raise ValueError("need at least two vertices")
    if not is_connected(graph):
        raise DisconnectedError("spectral summary needs a connected graph")
    op = lazy_operator(graph)
    top = np.sqrt(graph.degrees().astype(float))
    theta, vec, iters, resid = lanczos_second(op, top, tol, krylov_cap, seed=seed)
    lam2 = float(min(max(theta, 0.0), 1.0))
    gap = 1.0 - lam2
    f = vec / top
    phi, witness = sweep_cut(graph, f)
    return SpectralSummary(gap, lam2, phi, gap / 2.0, min(phi, math.sqrt(2.0 * gap)),
                           iters, resid, witness)


# ---------------------------------------------------------------------------
# disjoint path families


@dataclass
class PathFamily:
    paths: list
    max_len: int | None = None

    def __len__(self):
        return len(self.paths)


def validate_path_family(g, fam: PathFamily, A, B, max_len=None) -> list[str]:
    """Disjointness, edge validity, length cap and endpoint classes."""
    graph = as_graph(g)
    A, B = set(int(a) for a in A), set(int(b) for b in B)
    index = {int(v): i for i, v in enumerate(graph.labels)}
    problems, used = [], set()
    cap = max_len if max_len is not None else fam.max_len
    for k, path in enumerate(fam.paths):
        if not path:
            problems.append(f"path {k} empty")
            continue
        if path[0] not in A or path[-1] not in B:
            problems.append(f"path {k} endpoints not in (A, B)")
        if cap is not None and len(path) - 1 > cap:
            problems.append(f"path {k} length {len(path) - 1} > {cap}")
        for x, y in zip(path, path[1:]):
            if x not in index or y not in index or not graph.has_edge(index[x], index[y]):
                problems.append(f"path {k} uses non-edge ({x}, {y})")
        for v in path:
            if v in used:
                problems.append(f"vertex {v} reused")
            used.add(v)
    return problems


def _dinic_maxflow(graph: Graph, A_local, B_local):
    m = graph.m
    src, sink = 2 * m, 2 * m + 1
    head = [[] for _ in range(2 * m + 2)]
    to, cap = [], []

    def add(u, v, c):
        head[u].append(len(to)); to.append(v); cap.append(c)
        head[v].append(len(to)); to.append(u); cap.append(0)

    for u in range(m):
        add(2 * u, 2 * u + 1, 1)
        for w in graph.nbrs(u):
            add(2 * u + 1, 2 * int(w), 1)
    for a in A_local:
        add(src, 2 * int(a), 1)
    for b in B_local:
        add(2 * int(b) + 1, sink, 1)

    flow = 0
    while True:
        level = [-1] * (2 * m + 2)
        level[src] = 0
        dq = deque([src])
        while dq:
            u = dq.popleft()
            for e in head[u]:
                if cap[e] > 0 and level[to[e]] < 0:
                    level[to[e]] = level[u] + 1
                    dq.append(to[e])
        if level[sink] < 0:
            break
        it = [0] * (2 * m + 2)
        while True:
            # iterative DFS for one augmenting path in the level graph
            stack, edges = [src], []
            while stack:
                u = stack[-1]
                if u == sink:
                    break
                advanced = False
                while it[u] < len(head[u]):
                    e = head[u][it[u]]
                    v = to[e]
                    if cap[e] > 0 and level[v] == level[u] + 1:
                        stack.append(v)
                        edges.append(e)
                        advanced = True
                        break
                    it[u] += 1
                if not advanced:
                    stack.pop()
                    if edges:
                        edges.pop()
                    if stack:
                        it[stack[-1]] += 1
            if not stack:
                break
            for e in edges:
                cap[e] -= 1
                cap[e ^ 1] += 1
            flow += 1
    # decompose into vertex paths
    paths = []
    for e in head[src]:
        if cap[e] != 0:
            continue  # unused source arc
        u = to[e]
        path = []
        while u != sink:
            if u % 2 == 0:
                path.append(u // 2)
            nxt = None
            for f in head[u]:
                if f % 2 == 0 and cap[f] == 0 and to[f] != src:
                    nxt = to[f]
                    cap[f] = -1  # consume so cycles cannot be re-walked
                    break
            u = nxt
        paths.append(path)
    return flow, paths


def _trim(path, A_local, B_local):
    last_a = max(i for i, v in enumerate(path) if v in A_local)
    first_b = min(i for i, v in enumerate(path) if v in B_local and i >= last_a)
    return path[last_a:first_b + 1]


def disjoint_paths_maxflow(g, A, B) -> PathFamily:
    """Maximum family of vertex-disjoint A-B paths (unit vertex capacities)."""
    graph = as_graph(g)
    A_local = set(graph.local(A).tolist())
    B_local = set(graph.local(B).tolist())
    if A_local & B_local:
        raise ValueError("A and B must be disjoint")
    if not A_local or not B_local:
        raise ValueError("A and B must be nonempty")
    _, paths = _dinic_maxflow(graph, sorted(A_local), sorted(B_local))
    out = [[int(graph.labels[v]) for v in _trim(p, A_local, B_local)] for p in paths]
    return PathFamily(sorted(out))


@njit(cache=True)
def _greedy_paths(indptr, indices, role, max_len):
    # role: 1 = A, 2 = B, 0 = other
    m = role.size
    alive = np.ones(m, dtype=np.bool_)
    parent = np.full(m, -1, dtype=np.int64)
    dist = np.full(m, -1, dtype=np.int64)
    queue = np.empty(m, dtype=np.int64)
    out = []
    while True:
        tail = 0
        for v in range(m):
            if alive[v] and role[v] == 1:
                dist[v] = 0
                parent[v] = v
                queue[tail] = v
                tail += 1
        head = 0
        found = -1
        while head < tail and found < 0:
            u = queue[head]
            head += 1
            if dist[u] >= max_len:
                break
            for k in range(indptr[u], indptr[u + 1]):
                w = indices[k]
                if alive[w] and dist[w] < 0:
                    dist[w] = dist[u] + 1
                    parent[w] = u
                    queue[tail] = w
                    tail += 1
                    if role[w] == 2:
                        found = w
                        break
        if found < 0:
            break
        path = [found]
        x = found
        while parent[x] != x:
            x = parent[x]
            path.append(x)
        for x in path:
            alive[x] = False
        out.append(np.array(path[::-1], dtype=np.int64))
        for k in range(tail):
            dist[queue[k]] = -1
            parent[queue[k]] = -1
    return out


def disjoint_short_paths_greedy(g, A, B, max_len: int = 5) -> PathFamily:
    """Shortest-first packing of vertex-disjoint A-B paths of length <= max_len."""
    graph = as_graph(g)
    role = np.zeros(graph.m, dtype=np.int64)
    a, b = graph.local(A), graph.local(B)
    role[a] = 1
    if np.any(role[b] == 1):
        raise ValueError("A and B must be disjoint")
    role[b] = 2
    found = _greedy_paths(graph.indptr, graph.indices, role, max_len)
    return PathFamily([[int(graph.labels[v]) for v in p] for p in found], max_len)


# ---------------------------------------------------------------------------
# matchings, degrees, connected-set samplers


def greedy_matching_experiment(F, p: float, seed: int) -> int:
    """Greedy maximal matching size in a p-random subset of the edge list F.

    ``F`` holds (u, v) vertex pairs; edges are scanned in the order given.
    """
    F = np.asarray(F, dtype=np.int64).reshape(-1, 2)
    rng = np.random.default_rng(seed)
    kept = F[rng.random(len(F)) < p]
    used = set()
    size = 0
    for u, v in kept.tolist():
        if u not in used and v not in used:
            used.add(u)
            used.add(v)
            size += 1
    return size


def degree_census(g: HypercubeSubgraph, threshold: float | None = None) -> int:
    """Number of vertices with degree >= threshold (default ln d)."""
    if threshold is None:
        threshold = math.log(g.d)
    return int(np.count_nonzero(g.degrees() >= threshold))


@njit(cache=True)
def _grow_connected(indptr, indices, start, k, uniforms):
    m = indptr.size - 1
    state = np.zeros(m, dtype=np.int8)  # 1 in S, 2 frontier
    front = np.empty(m, dtype=np.int64)
    where = np.full(m, -1, dtype=np.int64)
    members = np.empty(k, dtype=np.int64)
    nf = 0
    inner = 0
    count = 0
    v = start
    for step in range(k):
        if step > 0:
            if nf == 0:
                break
            j = int(uniforms[step] * nf)
            v = front[j]
            last = front[nf - 1]
            front[j] = last
            where[last] = j
            nf -= 1
        state[v] = 1
        members[count] = v
        count += 1
        for t in range(indptr[v], indptr[v + 1]):
            w = indices[t]
            if state[w] == 1:
                inner += 1
            elif state[w] == 0:
                state[w] = 2
                front[nf] = w
                where[w] = nf
                nf += 1
    return members[:count], inner, nf


def sample_connected_set(graph: Graph, k: int, rng: np.random.Generator, start=None):
    """Random connected set grown by uniform frontier choice (not uniform over sets).

    Returns (local members, inner edge count, |N(S)|).
    """
    if start is None:
        start = int(rng.integers(graph.m))
    return _grow_connected(graph.indptr, graph.indices, start, k, rng.random(k))


def connected_excess_sample(g, k: int, samples: int, seed: int, component=None):
    """Max e(S)/|S| over sampled connected sets of size k in the largest component."""
    if component is None and isinstance(g, HypercubeSubgraph):
        from .components import census
        component = census(g).giant()
    graph = as_graph(g, component)
    if graph.m < k:
        raise ValueError(f"no component with at least {k} vertices")
    rng = np.random.default_rng(seed)
    best = 0.0
    for _ in range(samples):
        members, inner, _ = sample_connected_set(graph, k, rng)
        best = max(best, inner / len(members))
    return best


def expansion_profile(g, component, size_grid, samples: int, seed: int) -> dict:
    """Per size s: min sampled |N(S)|/|S| over connected S grown in the component.

    Sampled minima only upper-bound the true minimum over all sets.
    """
    graph = as_graph(g, component)
    rng = np.random.default_rng(seed)
    out = {}
    for s in size_grid:
        s = int(s)
        if s > graph.m or s < 1:
            raise ValueError(f"size {s} outside [1, {graph.m}]")
        best = math.inf
        for _ in range(samples):
            members, _, boundary = sample_connected_set(graph, s, rng)
            if len(members) == s:
                best = min(best, boundary / s)
        out[s] = best
    return out


# ---------------------------------------------------------------------------
# direction split


@dataclass(frozen=True)
class DirectionSplit:
    best: int
    fractions: np.ndarray
    beta: float

    @property
    def min_side(self) -> float:
        p = float(self.fractions[self.best])
        return min(p, 1.0 - p)


def direction_split(W, d: int) -> DirectionSplit:
    """Coordinate that splits W most evenly, with the entropy guarantee beta.

    log2|W| = H(X) <= sum_i h(p_i) <= d max_i h(p_i), so the chosen
    coordinate has min(p, 1-p) >= h^-1(log2|W| / d).
    """
    W = np.unique(np.asarray(list(W), dtype=np.int64))
    if len(W) == 0:
        raise ValueError("W must be nonempty")
    fractions = np.array([np.mean((W >> i) & 1) for i in range(d)])
    ent = np.array([analytic.binary_entropy(float(x)) for x in fractions])
    best = int(np.argmax(ent))
    beta = analytic.inverse_binary_entropy(min(1.0, math.log2(len(W)) / d))
    return DirectionSplit(best, fractions, beta)
