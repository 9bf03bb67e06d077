"""Spanning trees and the cut-deepest-heavy-subtree decomposition.

A tree is split into connected pieces by repeatedly cutting off the subtree
of a deepest vertex whose (remaining) subtree has at least ``ell`` vertices.
Ties between equally deep vertices go to the smaller vertex id.  Cutting
proceeds in order of non-increasing depth, so a single bottom-up sweep in
(depth desc, id asc) order reproduces the iterative procedure exactly.  The
undersized remainder around the root is merged into the last piece cut;
that piece's cut vertex has its parent in the remainder, so the merged
piece stays connected.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from . import analytic
from .errors import CapExceededError
from .graph import as_graph, bfs_tree
from .hypercube import HypercubeSubgraph


@dataclass(frozen=True, eq=False)
class RootedTree:
    """Tree over external labels; ``parent`` holds local indices, root -> itself."""
    labels: np.ndarray
    parent: np.ndarray
    root_index: int = 0

    @property
    def root(self) -> int:
        return int(self.labels[self.root_index])

    @property
    def size(self) -> int:
        return len(self.labels)

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.size, dtype=np.int64)
        nonroot = np.arange(self.size) != self.root_index
        deg[nonroot] += 1
        np.add.at(deg, self.parent[nonroot], 1)
        return deg

    def children(self) -> list[list[int]]:
        kids = [[] for _ in range(self.size)]
        for u, par in enumerate(self.parent):
            if u != self.root_index:
                kids[par].append(u)
        return kids

    def edges(self):
        """Tree edges as (child, parent) external-label pairs."""
        u = np.flatnonzero(np.arange(self.size) != self.root_index)
        return np.column_stack([self.labels[u], self.labels[self.parent[u]]])

    def adjacency(self):
        """CSR (indptr, indices) over local indices."""
        u = np.flatnonzero(np.arange(self.size) != self.root_index)
        return _csr(self.size, np.concatenate([u, self.parent[u]]),
                    np.concatenate([self.parent[u], u]))


def _csr(m, src, dst):
    return _csr_kernel(m, np.asarray(src, dtype=np.int64), np.asarray(dst, dtype=np.int64))


@njit(cache=True)
def _csr_kernel(m, src, dst):
    indptr = np.zeros(m + 1, dtype=np.int64)
    for u in src:
        indptr[u + 1] += 1
    for u in range(m):
        indptr[u + 1] += indptr[u]
    fill = indptr[:-1].copy()
    indices = np.empty(src.size, dtype=np.int64)
    for k in range(src.size):
        indices[fill[src[k]]] = dst[k]
        fill[src[k]] += 1
    for u in range(m):
        indices[indptr[u]:indptr[u + 1]].sort()
    return indptr, indices


def _local_index(labels, values):
    """Positions of ``values`` in ``labels``; -1 where absent."""
    order = np.argsort(labels, kind="stable")
    srt = labels[order]
    pos = np.searchsorted(srt, values)
    pos = np.minimum(pos, len(srt) - 1)
    return np.where(srt[pos] == values, order[pos], -1)


@dataclass(eq=False)
class PieceDecomposition:
    pieces: list
    ell: int
    c1: int
    c2: int
    r: int
    cut_vertices: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)

    @property
    def sizes(self) -> list[int]:
        return [len(p) for p in self.pieces]


def bfs_spanning_tree(g, component_vertices, root: int) -> RootedTree:
    graph = as_graph(g, component_vertices)
    where = np.flatnonzero(graph.labels == root)
    if len(where) == 0:
        raise ValueError(f"root {root} not in component")
    parent, order = bfs_tree(graph.indptr, graph.indices, int(where[0]))
    if len(order) != graph.m:
        raise ValueError("component is not connected")
    return RootedTree(graph.labels.copy(), parent, int(where[0]))


def tree_from_edges(m: int, edges, root: int = 0, labels=None) -> RootedTree:
    """Rooted tree on local vertices 0..m-1 from an undirected edge list."""
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if len(edges) != m - 1:
        raise ValueError("a tree on m vertices has m - 1 edges")
    indptr, indices = _csr(m, np.concatenate([edges[:, 0], edges[:, 1]]),
                           np.concatenate([edges[:, 1], edges[:, 0]]))
    parent, order = bfs_tree(indptr, indices, root)
    if len(order) != m:
        raise ValueError("edges do not form a spanning tree")
    if labels is None:
        labels = np.arange(m, dtype=np.int64)
    return RootedTree(np.asarray(labels, dtype=np.int64), parent, root)


@njit(cache=True)
def _prufer_decode(seq, m):
    degree = np.ones(m, dtype=np.int64)
    for x in seq:
        degree[x] += 1
    edges = np.empty((m - 1, 2), dtype=np.int64)
    ptr = 0
    while degree[ptr] != 1:
        ptr += 1
    leaf = ptr
    k = 0
    for x in seq:
        edges[k, 0] = leaf
        edges[k, 1] = x
        k += 1
        degree[x] -= 1
        if x < ptr and degree[x] == 1:
            leaf = x
        else:
            ptr += 1
            while degree[ptr] != 1:
                ptr += 1
            leaf = ptr
    # the last edge joins the remaining leaf to m - 1
    edges[k, 0] = leaf
    edges[k, 1] = m - 1
    return edges


def random_labeled_tree(m: int, rng: np.random.Generator) -> RootedTree:
    """Uniform random labelled tree on m vertices (Pruefer decoding), root 0."""
    if m == 1:
        return RootedTree(np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64), 0)
    if m == 2:
        return tree_from_edges(2, [(0, 1)])
    seq = rng.integers(0, m, size=m - 2).astype(np.int64)
    return tree_from_edges(m, _prufer_decode(seq, m))


@njit(cache=True)
def _decompose(parent, order, root, ell):
    m = parent.size
    sz = np.ones(m, dtype=np.int64)
    cut = np.zeros(m, dtype=np.bool_)
    cuts = np.empty(m, dtype=np.int64)
    ncut = 0
    for u in order:
        if sz[u] >= ell:
            cut[u] = True
            cuts[ncut] = u
            ncut += 1
        elif u != root:
            sz[parent[u]] += sz[u]
    return cut, cuts[:ncut]


def tree_decompose(t: RootedTree, ell: int, c2: int | None = None) -> PieceDecomposition:
    """Split ``t`` into connected pieces of size >= ell and tree-diameter <= 2 ell.

    Pieces come out in non-increasing size (ties by cut order).  ``c1`` is the
    maximum tree degree, ``c2`` the degree bound for all but ``r`` vertices
    (default ``min(c1, 2)``).
    """
    ell = int(ell)
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if t.size < ell:
        raise ValueError(f"tree has {t.size} < ell={ell} vertices")
    top_down = _top_down_order(t)
    depth = _depths(t.parent, top_down)
    bottom_up = np.lexsort((t.labels, -depth)).astype(np.int64)
    cut, cuts = _decompose(t.parent, bottom_up, t.root_index, ell)
    owner = _owners(t.parent, top_down, cut, t.root_index, cuts[-1])
    rank = np.full(t.size, -1, dtype=np.int64)
    rank[cuts] = np.arange(len(cuts))
    sizes = np.bincount(owner, minlength=t.size)[cuts]
    by_piece = np.argsort(rank[owner], kind="stable")
    bounds = np.concatenate([[0], np.cumsum(sizes)])
    order = np.lexsort((np.arange(len(cuts)), -sizes))
    pieces = [t.labels[by_piece[bounds[k]:bounds[k + 1]]] for k in order]
    ordered = cuts[order]

    deg = t.degrees()
    c1 = max(int(deg.max()), 1)
    if c2 is None:
        c2 = min(c1, 2)
    if not 1 <= c2 <= c1:
        raise ValueError("need 1 <= c2 <= c1")
    r = int(np.count_nonzero(deg > c2))
    return PieceDecomposition(pieces, ell, c1, int(c2), r,
                              [int(t.labels[c]) for c in ordered])


@njit(cache=True)
def _depths(parent, top_down):
    depth = np.zeros(parent.size, dtype=np.int64)
    for u in top_down[1:]:
        depth[u] = depth[parent[u]] + 1
    return depth


@njit(cache=True)
def _owners(parent, top_down, cut, root, last):
    owner = np.full(parent.size, -1, dtype=np.int64)
    for u in top_down:
        if cut[u]:
            owner[u] = u
        elif u != root:
            owner[u] = owner[parent[u]]
    for u in range(parent.size):
        if owner[u] < 0:
            owner[u] = last
    return owner


def _top_down_order(t: RootedTree) -> np.ndarray:
    indptr, indices = t.adjacency()
    _, order = bfs_tree(indptr, indices, t.root_index)
    return order


@njit(cache=True)
def _piece_checks(indptr, indices, parent, root, piece, npieces):
    m = parent.size
    size = np.zeros(npieces, dtype=np.int64)
    inner = np.zeros(npieces, dtype=np.int64)
    for u in range(m):
        size[piece[u]] += 1
        if u != root and piece[parent[u]] == piece[u]:
            inner[piece[u]] += 1
    # diameter of each piece by double sweep (exact on trees)
    dist = np.full(m, -1, dtype=np.int64)
    queue = np.empty(m, dtype=np.int64)
    diam = np.zeros(npieces, dtype=np.int64)
    done = np.zeros(npieces, dtype=np.bool_)
    for s in range(m):
        pid = piece[s]
        if done[pid]:
            continue
        done[pid] = True
        far = s
        for sweep in range(2):
            dist[far] = 0
            queue[0] = far
            head, tail = 0, 1
            best = far
            while head < tail:
                u = queue[head]
                head += 1
                if dist[u] > dist[best]:
                    best = u
                for k in range(indptr[u], indptr[u + 1]):
                    w = indices[k]
                    if piece[w] == pid and dist[w] < 0:
                        dist[w] = dist[u] + 1
                        queue[tail] = w
                        tail += 1
            if sweep == 1:
                diam[pid] = dist[best]
            for k in range(tail):
                dist[queue[k]] = -1
            far = best
    return size, inner, diam


def verify_decomposition(t: RootedTree, dec: PieceDecomposition) -> list[str]:
    """Mechanically check the five decomposition guarantees; returns violations."""
    problems = []
    piece = np.full(t.size, -1, dtype=np.int64)
    flat = np.concatenate([np.asarray(p, dtype=np.int64) for p in dec.pieces])
    pid = np.repeat(np.arange(len(dec.pieces)), [len(p) for p in dec.pieces])
    loc = _local_index(t.labels, flat)
    if np.any(loc < 0):
        problems.append(f"{int(np.sum(loc < 0))} foreign vertices in pieces")
        loc, pid = loc[loc >= 0], pid[loc >= 0]
    if len(np.unique(loc)) != len(loc):
        problems.append("pieces overlap")
    piece[loc] = pid
    if np.any(piece < 0):
        problems.append(f"{int(np.sum(piece < 0))} vertices not covered")
        return problems
    indptr, indices = t.adjacency()
    size, inner, diam = _piece_checks(indptr, indices, t.parent, t.root_index,
                                      piece, len(dec.pieces))
    ell = dec.ell
    for k in range(len(dec.pieces)):
        if inner[k] != size[k] - 1:
            problems.append(f"piece {k} not connected")
        if diam[k] > 2 * ell:
            problems.append(f"piece {k} diameter {diam[k]} > {2 * ell}")
        cap = dec.c1 if k < dec.r else dec.c2
        if not ell <= size[k] <= cap * ell:
            problems.append(f"piece {k} size {size[k]} outside [{ell}, {cap * ell}]")
    deg = t.degrees()
    if dec.c1 < deg.max() or dec.r != int(np.count_nonzero(deg > dec.c2)):
        problems.append("degree parameters inconsistent with tree")
    return problems


def piece_family(g: HypercubeSubgraph, giant_vertices, s: float, c8: float,
                 c2: int | None = None) -> PieceDecomposition:
    """Decompose a spanning tree of the giant into pieces of size ~ d / (c8 b(s)).

    Size bounds [d/(c8 b(s)), d^2/(c8 b(s))] are checked and violations are
    recorded in ``notes`` rather than raised.
    """
    d = g.d
    b = analytic.b_of_s(s, d)
    if b <= 0:
        raise ValueError("b(s) = 0: s must be below 2^d")
    lower = d / (c8 * b)
    ell = max(1, math.ceil(lower))
    giant_vertices = np.asarray(giant_vertices, dtype=np.int64)
    if len(giant_vertices) < ell:
        raise ValueError(f"giant has {len(giant_vertices)} < ell={ell} vertices")
    tree = bfs_spanning_tree(g, giant_vertices, int(giant_vertices.min()))
    dec = tree_decompose(tree, ell, c2)
    upper = d * d / (c8 * b)
    sizes = np.array(dec.sizes)
    dec.notes.update(
        s=s, lower=lower, upper=upper,
        below_lower=int(np.count_nonzero(sizes < lower)),
        above_upper=int(np.count_nonzero(sizes > upper)),
        above_log=int(np.count_nonzero(sizes > lower * math.log(d))),
    )
    return dec


ENUM_MAX_K = 7
ENUM_MAX_D = 5


def enumerate_rooted_subtrees(g: HypercubeSubgraph, v: int, k: int) -> int:
    """Exact number of k-vertex subtrees of ``g`` that contain ``v``."""
    if k > ENUM_MAX_K or g.d > ENUM_MAX_D:
        raise CapExceededError(f"enumeration capped at k <= {ENUM_MAX_K}, d <= {ENUM_MAX_D}")
    if k < 1:
        raise ValueError("k must be >= 1")
    nbrs = [[u for u in range(g.n) if g.has_edge(w, u)] for w in range(g.n)]

    def grow(tree, frontier):
        if len(tree) == k:
            return 1
        total = 0
        for i, (_, w) in enumerate(frontier):
            inside = tree | {w}
            rest = [e for e in frontier[i + 1:] if e[1] != w]
            rest += [(w, x) for x in nbrs[w] if x not in inside]
            total += grow(inside, rest)
        return total

    return grow(frozenset([v]), [(v, x) for x in nbrs[v]])
