"""Component census of hypercube subgraphs and giant-component measurements."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import numpy as np
from numba import njit

from . import hypercube as hc
from .hypercube import HypercubeSubgraph


@dataclass(frozen=True, eq=False)
class ComponentCensus:
    """Component labels (smallest vertex id of each component) and sizes.

    ``sizes`` is non-increasing; ``ids[k]`` is the label of the component of
    size ``sizes[k]`` (ties broken by smaller label).
    """
    label: np.ndarray
    sizes: np.ndarray
    ids: np.ndarray

    @property
    def giant_id(self) -> int:
        return int(self.ids[0])

    @property
    def n(self) -> int:
        return len(self.label)

    def members(self, cid: int) -> np.ndarray:
        return np.flatnonzero(self.label == cid)

    def giant(self) -> np.ndarray:
        return self.members(self.giant_id)

    def giant_mask(self) -> np.ndarray:
        return self.label == self.giant_id

    def size_of(self, cid: int) -> int:
        return int(np.count_nonzero(self.label == cid))


@njit(cache=True)
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]  # path halving
        x = parent[x]
    return x


@njit(cache=True)
def _uf_labels(masks, d):
    n = masks.size
    parent = np.arange(n)
    size = np.ones(n, dtype=np.int64)
    for v in range(n):
        m = masks[v]
        for i in range(d):
            if (m >> i) & 1:
                u = v ^ (1 << i)
                if u > v:
                    a = _find(parent, v)
                    b = _find(parent, u)
                    if a != b:
                        if size[a] < size[b]:
                            a, b = b, a
                        parent[b] = a
                        size[a] += size[b]
    smallest = np.full(n, n, dtype=np.int64)
    label = np.empty(n, dtype=np.int64)
    for v in range(n):
        r = _find(parent, v)
        if smallest[r] == n:
            smallest[r] = v  # first visit in increasing v is the minimum
        label[v] = smallest[r]
    return label


def census(g: HypercubeSubgraph) -> ComponentCensus:
    label = _uf_labels(g.open.astype(np.int64), g.d)
    ids, counts = np.unique(label, return_counts=True)
    order = np.lexsort((ids, -counts))
    return ComponentCensus(label, counts[order], ids[order])


def giant_fraction(c: ComponentCensus) -> Fraction:
    return Fraction(int(c.sizes[0]), c.n)


def second_largest_order(c: ComponentCensus) -> int:
    return int(c.sizes[1]) if len(c.sizes) > 1 else 0


@dataclass
class AttachmentReport:
    max_attachment: int
    histogram: dict = field(default_factory=dict)
    skipped: bool = False
    giant_gap: int = 0  # |V(L1)| - |V(L'1)|


def attachment_report(q1: HypercubeSubgraph, q2: HypercubeSubgraph,
                      census1: ComponentCensus | None = None,
                      census2: ComponentCensus | None = None) -> AttachmentReport:
    """Attachment volumes |C_v| for v in the first-round giant L'1.

    C_v is the union of the components of L1 - L'1 (taken in Q2) that are
    adjacent in Q2 to v.  If L'1 is not contained in L1 the trial is
    reported as skipped.
    """
    if not hc.is_subgraph(q1, q2):
        raise ValueError("Q1 is not a subgraph of Q2")
    census1 = census1 or census(q1)
    census2 = census2 or census(q2)
    in_first = census1.giant_mask()
    in_second = census2.giant_mask()
    gap = int(in_second.sum() - in_first.sum())
    if np.any(in_first & ~in_second):
        return AttachmentReport(0, {}, skipped=True, giant_gap=gap)
    rest = in_second & ~in_first
    rest_census = census(hc.induced(q2, rest))
    rest_label = np.where(rest, rest_census.label, -1)
    sizes = np.zeros(q2.n, dtype=np.int64)
    np.add.at(sizes, rest_label[rest], 1)

    verts = np.flatnonzero(in_first)
    dirs = np.arange(q2.d, dtype=np.int64)
    nb = verts[:, None] ^ (np.int64(1) << dirs)
    open_bit = ((q2.open[verts][:, None].astype(np.int64) >> dirs) & 1).astype(bool)
    lab = np.where(open_bit, rest_label[nb], -1)
    lab.sort(axis=1)
    fresh = np.ones_like(lab, dtype=bool)
    fresh[:, 1:] = lab[:, 1:] != lab[:, :-1]
    fresh &= lab >= 0
    volume = np.where(fresh, sizes[np.maximum(lab, 0)], 0).sum(axis=1)
    hist = dict(sorted(Counter(volume.tolist()).items()))
    return AttachmentReport(int(volume.max(initial=0)), hist, giant_gap=gap)


def two_hop_density(g: HypercubeSubgraph, c: ComponentCensus | None = None) -> int:
    """min over v in V(Q^d) of |{u in L1 : dist_{Q^d}(u, v) <= 2}|."""
    c = c or census(g)
    inside = c.giant_mask().astype(np.int64)
    idx = np.arange(g.n, dtype=np.int64)
    total = inside.copy()
    for i in range(g.d):
        total += inside[idx ^ (1 << i)]
        for j in range(i + 1, g.d):
            total += inside[idx ^ ((1 << i) | (1 << j))]
    return int(total.min())


def two_hop_ball_size(d: int) -> int:
    return 1 + d + comb(d, 2)


def five_hop_boundary(q2: HypercubeSubgraph, S, restrict, hops: int = 5) -> int:
    """|N^5_{Q2}(S) & restrict|: vertices outside S within ``hops`` of S."""
    S_mask = _as_mask(S, q2.n)
    if not S_mask.any():
        raise ValueError("S must be nonempty")
    restrict_mask = _as_mask(restrict, q2.n)
    seen = S_mask.copy()
    frontier = S_mask.copy()
    for _ in range(hops):
        frontier = hc.expand(q2, frontier) & ~seen
        if not frontier.any():
            break
        seen |= frontier
    return int(np.count_nonzero(seen & ~S_mask & restrict_mask))


def _as_mask(S, n):
    S = np.asarray(S)
    if S.dtype == bool and S.shape == (n,):
        return S.copy()
    mask = np.zeros(n, dtype=bool)
    mask[S.astype(np.int64)] = True
    return mask
