"""Compressed adjacency views of (pieces of) hypercube subgraphs.

Measurement routines work on a :class:`Graph`: a CSR adjacency over local
indices ``0..m-1`` plus the external vertex label of each local index.  A
view of a hypercube component keeps neighbours in ascending direction order,
so every traversal built on it is deterministic.  Small hand-made graphs
(paths, cycles, uniform random graphs) are built with :meth:`Graph.from_edges`.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
from numba import njit

from .hypercube import HypercubeSubgraph


@dataclass(frozen=True, eq=False)
class Graph:
    labels: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray

    @property
    def m(self) -> int:
        return len(self.labels)

    @property
    def num_edges(self) -> int:
        return len(self.indices) // 2

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def nbrs(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def local(self, vertices) -> np.ndarray:
        """Local indices of external vertex labels."""
        lookup = {int(v): i for i, v in enumerate(self.labels)}
        try:
            return np.array([lookup[int(v)] for v in vertices], dtype=np.int64)
        except KeyError as exc:
            raise ValueError(f"vertex {exc.args[0]} not in graph") from None

    def has_edge(self, u: int, v: int) -> bool:
        return bool(np.any(self.nbrs(u) == v))

    def edges(self):
        """(u, v) local pairs with u < v."""
        src = np.repeat(np.arange(self.m), self.degrees())
        keep = src < self.indices
        return np.column_stack([src[keep], self.indices[keep]])

    def adjacency_bitmasks(self) -> np.ndarray:
        if self.m > 62:
            raise ValueError("bitmask adjacency needs at most 62 vertices")
        masks = np.zeros(self.m, dtype=np.int64)
        for u in range(self.m):
            for w in self.nbrs(u):
                masks[u] |= 1 << int(w)
        return masks

    @classmethod
    def from_edges(cls, m: int, edges, labels=None) -> "Graph":
        adj = [set() for _ in range(m)]
        for u, v in edges:
            if u == v:
                raise ValueError("self-loops are not allowed")
            adj[u].add(v)
            adj[v].add(u)
        indptr = np.zeros(m + 1, dtype=np.int64)
        indptr[1:] = np.cumsum([len(a) for a in adj])
        indices = np.array([w for a in adj for w in sorted(a)], dtype=np.int64)
        if labels is None:
            labels = np.arange(m, dtype=np.int64)
        return cls(np.asarray(labels, dtype=np.int64), indptr, indices)

    def subgraph(self, local_vertices) -> "Graph":
        """Induced subgraph on the given local indices (order preserved)."""
        local_vertices = np.asarray(local_vertices, dtype=np.int64)
        pos = np.full(self.m, -1, dtype=np.int64)
        pos[local_vertices] = np.arange(len(local_vertices))
        rows = []
        counts = np.zeros(len(local_vertices) + 1, dtype=np.int64)
        for k, u in enumerate(local_vertices):
            w = pos[self.nbrs(u)]
            w = w[w >= 0]
            rows.append(w)
            counts[k + 1] = len(w)
        indices = np.concatenate(rows) if rows else np.empty(0, dtype=np.int64)
        return Graph(self.labels[local_vertices], np.cumsum(counts), indices.astype(np.int64))


def hypercube_view(g: HypercubeSubgraph, vertices=None) -> Graph:
    """CSR view of ``g`` induced on ``vertices`` (all of V(Q^d) by default)."""
    if vertices is None:
        verts = np.arange(g.n, dtype=np.int64)
    else:
        verts = np.asarray(vertices, dtype=np.int64)
    pos = np.full(g.n, -1, dtype=np.int64)
    pos[verts] = np.arange(len(verts))
    dirs = np.arange(g.d, dtype=np.int64)
    cand = verts[:, None] ^ (np.int64(1) << dirs)
    ok = ((g.open[verts][:, None].astype(np.int64) >> dirs) & 1).astype(bool)
    ok &= pos[cand] >= 0
    indptr = np.zeros(len(verts) + 1, dtype=np.int64)
    np.cumsum(ok.sum(axis=1), out=indptr[1:])
    return Graph(verts, indptr, pos[cand][ok].astype(np.int64))


def as_graph(g, component=None) -> Graph:
    if isinstance(g, Graph):
        if component is None:
            return g
        return g.subgraph(g.local(component))
    if isinstance(g, HypercubeSubgraph):
        return hypercube_view(g, component)
    raise TypeError(f"expected Graph or HypercubeSubgraph, got {type(g).__name__}")


def to_local_set(graph: Graph, S) -> np.ndarray:
    """Boolean membership mask (local indices) of external labels in S."""
    mask = np.zeros(graph.m, dtype=bool)
    mask[graph.local(S)] = True
    return mask


# ---------------------------------------------------------------------------
# numba kernels


@njit(cache=True)
def bfs_dist(indptr, indices, src):
    m = indptr.size - 1
    dist = np.full(m, -1, dtype=np.int64)
    queue = np.empty(m, dtype=np.int64)
    dist[src] = 0
    queue[0] = src
    head, tail = 0, 1
    while head < tail:
        u = queue[head]
        head += 1
        for k in range(indptr[u], indptr[u + 1]):
            w = indices[k]
            if dist[w] < 0:
                dist[w] = dist[u] + 1
                queue[tail] = w
                tail += 1
    return dist


@njit(cache=True)
def bfs_tree(indptr, indices, src):
    """BFS parents (root maps to itself) and visit order."""
    m = indptr.size - 1
    parent = np.full(m, -1, dtype=np.int64)
    order = np.empty(m, dtype=np.int64)
    parent[src] = src
    order[0] = src
    head, tail = 0, 1
    while head < tail:
        u = order[head]
        head += 1
        for k in range(indptr[u], indptr[u + 1]):
            w = indices[k]
            if parent[w] < 0:
                parent[w] = u
                order[tail] = w
                tail += 1
    return parent, order[:tail]


@njit(cache=True)
def eccentricity(indptr, indices, src):
    dist = bfs_dist(indptr, indices, src)
    best = 0
    for x in dist:
        if x > best:
            best = x
    return best


def is_connected(graph: Graph) -> bool:
    if graph.m == 0:
        return False
    return bool(np.all(bfs_dist(graph.indptr, graph.indices, 0) >= 0))


def component_labels(graph: Graph) -> np.ndarray:
    lab = np.full(graph.m, -1, dtype=np.int64)
    cur = 0
    for s in range(graph.m):
        if lab[s] >= 0:
            continue
        dq = deque([s])
        lab[s] = cur
        while dq:
            u = dq.popleft()
            for w in graph.nbrs(u):
                if lab[w] < 0:
                    lab[w] = cur
                    dq.append(w)
        cur += 1
    return lab


def two_core(graph: Graph) -> np.ndarray:
    """Local indices of the 2-core (iterated removal of degree <= 1 vertices)."""
    deg = graph.degrees().copy()
    alive = np.ones(graph.m, dtype=bool)
    stack = list(np.flatnonzero(deg <= 1))
    while stack:
        u = stack.pop()
        if not alive[u]:
            continue
        alive[u] = False
        for w in graph.nbrs(u):
            if alive[w]:
                deg[w] -= 1
                if deg[w] == 1:
                    stack.append(w)
    return np.flatnonzero(alive)
