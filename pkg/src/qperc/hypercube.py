"""Bit-packed random subgraphs of the hypercube Q^d.

A subgraph is stored as one d-bit mask per vertex: bit i of ``open[v]`` is
set iff the edge {v, v ^ 2**i} is retained.  Vertex ids are integers in
[0, 2**d) and bit i of the id is coordinate i.

Canonical edge index
--------------------
Every edge has a canonical form (endpoint, dir) where bit ``dir`` of
``endpoint`` is zero.  Canonical edges are ordered by ``endpoint * d + dir``
and re-packed densely into [0, n*d/2): the index of (endpoint, dir) is the
number of canonical pairs that sort before it.  Both sampling routes consume
random numbers in this order, so a (seed, d, p) triple replays exactly.

Random streams
--------------
Each graph is drawn from ``numpy.random.Generator(PCG64(seed))``.  Per-trial
seeds come from :func:`derive_seed`, a SplitMix64 mix of the master seed
and the trial index, which is bit-identical on every platform.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np

MAX_DIM = 30
SPARSE_THRESHOLD = 0.1

_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    z = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, index: int) -> int:
    """64-bit seed for stream ``index`` of ``master_seed``."""
    return splitmix64((master_seed & _MASK64) ^ splitmix64(index & _MASK64))


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed & _MASK64))


@dataclass(frozen=True)
class GenerationParams:
    d: int
    p: float
    seed: int = 0
    sprinkle_q2: float | None = None

    def __post_init__(self):
        _check_dim(self.d)
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p={self.p} outside [0, 1]")
        if self.sprinkle_q2 is not None and not 0.0 <= self.sprinkle_q2 <= self.p:
            raise ValueError(f"sprinkle_q2={self.sprinkle_q2} outside [0, p]")

    @classmethod
    def supercritical(cls, d, epsilon, seed=0, sprinkle_q2=None):
        return cls(d=d, p=(1.0 + epsilon) / d, seed=seed, sprinkle_q2=sprinkle_q2)


def _check_dim(d):
    if not isinstance(d, (int, np.integer)) or not 2 <= d <= MAX_DIM:
        raise ValueError(f"dimension d={d!r} outside supported range [2, {MAX_DIM}]")


@dataclass(frozen=True, eq=False)
class HypercubeSubgraph:
    d: int
    open: np.ndarray

    def __post_init__(self):
        _check_dim(self.d)
        arr = np.ascontiguousarray(self.open, dtype=np.uint32)
        if arr.shape != (1 << self.d,):
            raise ValueError(f"mask array must have length 2**{self.d}")
        arr.setflags(write=False)
        object.__setattr__(self, "open", arr)

    @property
    def n(self) -> int:
        return 1 << self.d

    def __eq__(self, other):
        if not isinstance(other, HypercubeSubgraph):
            return NotImplemented
        return self.d == other.d and np.array_equal(self.open, other.open)

    def __hash__(self):
        return hash((self.d, self.open.tobytes()))

    def degrees(self) -> np.ndarray:
        return popcount(self.open)

    def has_edge(self, u: int, v: int) -> bool:
        x = u ^ v
        if x == 0 or x & (x - 1):
            return False
        return bool(self.open[u] & x)

    def __repr__(self):
        return f"HypercubeSubgraph(d={self.d}, edges={edge_count(self)})"


def popcount(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.uint32)
    return np.bitwise_count(a).astype(np.int64)


def empty(d: int) -> HypercubeSubgraph:
    return HypercubeSubgraph(d, np.zeros(1 << d, dtype=np.uint32))


def full(d: int) -> HypercubeSubgraph:
    return HypercubeSubgraph(d, np.full(1 << d, (1 << d) - 1, dtype=np.uint32))


def from_edges(d: int, edges) -> HypercubeSubgraph:
    """Build a subgraph from (u, v) pairs of adjacent hypercube vertices."""
    masks = np.zeros(1 << d, dtype=np.uint32)
    for u, v in edges:
        x = u ^ v
        if x == 0 or x & (x - 1) or max(u, v) >= 1 << d:
            raise ValueError(f"({u}, {v}) is not an edge of Q^{d}")
        masks[u] |= x
        masks[v] |= x
    return HypercubeSubgraph(d, masks)


def is_symmetric(g: HypercubeSubgraph) -> bool:
    idx = np.arange(g.n, dtype=np.uint32)
    for i in range(g.d):
        bit = np.uint32(1 << i)
        here = (g.open >> np.uint32(i)) & np.uint32(1)
        there = (g.open[idx ^ bit] >> np.uint32(i)) & np.uint32(1)
        if not np.array_equal(here, there):
            return False
    return True


# ---------------------------------------------------------------------------
# canonical edge indexing


def _zero_prefix(d: int) -> np.ndarray:
    """prefix[v] = number of canonical pairs with endpoint < v."""
    zeros = d - popcount(np.arange(1 << d, dtype=np.uint32))
    prefix = np.empty((1 << d) + 1, dtype=np.int64)
    prefix[0] = 0
    np.cumsum(zeros, out=prefix[1:])
    return prefix


def edge_index(endpoint: int, direction: int, d: int) -> int:
    if (endpoint >> direction) & 1:
        raise ValueError("endpoint must have bit `direction` equal to 0")
    before = sum(d - bin(v).count("1") for v in range(endpoint))
    lower = sum(1 for i in range(direction) if not (endpoint >> i) & 1)
    return before + lower


def edges_from_indices(idx: np.ndarray, d: int, prefix: np.ndarray | None = None):
    """Decode canonical indices into (endpoint, dir) arrays."""
    idx = np.asarray(idx, dtype=np.int64)
    if prefix is None:
        prefix = _zero_prefix(d)
    endpoint = np.searchsorted(prefix, idx, side="right") - 1
    rank = idx - prefix[endpoint]
    direction = np.full(idx.shape, -1, dtype=np.int64)
    seen = np.zeros(idx.shape, dtype=np.int64)
    for i in range(d):
        zero = ((endpoint >> i) & 1) == 0
        hit = zero & (seen == rank) & (direction < 0)
        direction[hit] = i
        seen += zero
    return endpoint.astype(np.int64), direction


def canonical_edges(g: HypercubeSubgraph):
    """(endpoint, dir) of every open edge, in canonical order."""
    verts = np.arange(g.n, dtype=np.int64)
    bits = (g.open[:, None] >> np.arange(g.d, dtype=np.uint32)) & 1
    lower = ((verts[:, None] >> np.arange(g.d)) & 1) == 0
    v, i = np.nonzero(bits.astype(bool) & lower)
    return v.astype(np.int64), i.astype(np.int64)


def _masks_from_edges(d, endpoint, direction):
    masks = np.zeros(1 << d, dtype=np.uint32)
    for i in range(d):
        sel = endpoint[direction == i]
        bit = np.uint32(1 << i)
        masks[sel] |= bit
        masks[sel ^ (1 << i)] |= bit
    return masks


# ---------------------------------------------------------------------------
# sampling


def _sample_positions(rng, total, p):
    """Sorted indices of successes among `total` Bernoulli(p) trials."""
    if p <= 0.0 or total == 0:
        return np.empty(0, dtype=np.int64)
    if p >= SPARSE_THRESHOLD:
        return np.flatnonzero(rng.random(total) < p).astype(np.int64)
    # geometric gap skipping: expected work O(p * total)
    chunks = []
    last = -1
    mean = total * p
    batch = int(mean + 6.0 * np.sqrt(mean) + 64)
    while True:
        gaps = rng.geometric(p, size=batch).astype(np.int64)
        # for tiny p the draw can overflow int64; any gap past `total` ends the scan
        gaps = np.where((gaps < 1) | (gaps > total), total + 1, gaps)
        pos = last + np.cumsum(gaps)
        if pos[-1] >= total:
            chunks.append(pos[pos < total])
            break
        chunks.append(pos)
        last = int(pos[-1])
        batch = max(64, batch // 4)
    return np.concatenate(chunks)


def generate(params: GenerationParams) -> HypercubeSubgraph:
    """Sample Q^d_p: every canonical edge open independently with prob. p."""
    d, p = params.d, params.p
    if p == 0.0:
        return empty(d)
    if p == 1.0:
        return full(d)
    n = 1 << d
    total = n * d // 2
    rng = _rng(params.seed)
    if p >= SPARSE_THRESHOLD:
        coins = rng.random(total) < p
        verts = np.arange(n, dtype=np.int64)
        lower = ((verts[:, None] >> np.arange(d)) & 1) == 0
        v, i = np.nonzero(lower)  # row-major == canonical order
        return HypercubeSubgraph(d, _masks_from_edges(d, v[coins], i[coins]))
    pos = _sample_positions(rng, total, p)
    endpoint, direction = edges_from_indices(pos, d)
    return HypercubeSubgraph(d, _masks_from_edges(d, endpoint, direction))


def sprinkle_split(p: float, q2: float) -> float:
    """First-round probability q1 with (1 - q1)(1 - q2) = 1 - p."""
    if not 0.0 <= q2 <= p <= 1.0:
        raise ValueError(f"need 0 <= q2 <= p <= 1, got p={p}, q2={q2}")
    if p == 1.0:
        if q2 < 1.0:
            raise ValueError("p = 1 requires q2 = 1")
        return 0.0
    return (p - q2) / (1.0 - q2)


class SprinkledPair(NamedTuple):
    q1: HypercubeSubgraph
    q2: HypercubeSubgraph


def generate_sprinkled(params: GenerationParams, return_extra: bool = False):
    """Two-round exposure: Q1 at q1, then Q2 = Q1 | (independent sample at q2).

    Round one uses stream ``derive_seed(seed, 1)`` and the sprinkle round
    ``derive_seed(seed, 2)``.  With ``return_extra`` the sprinkle-round graph
    Q^d_{q2} is returned as a third element.
    """
    if params.sprinkle_q2 is None:
        raise ValueError("sprinkle_q2 must be set")
    q2 = params.sprinkle_q2
    q1 = sprinkle_split(params.p, q2)
    first = generate(GenerationParams(params.d, q1, derive_seed(params.seed, 1)))
    extra = generate(GenerationParams(params.d, q2, derive_seed(params.seed, 2)))
    second = union_graphs(first, extra)
    if return_extra:
        return first, second, extra
    return SprinkledPair(first, second)


# ---------------------------------------------------------------------------
# queries


def neighbors(g: HypercubeSubgraph, v: int) -> list[int]:
    if not 0 <= v < g.n:
        raise ValueError(f"vertex {v} outside [0, {g.n})")
    m = int(g.open[v])
    return [v ^ (1 << i) for i in range(g.d) if (m >> i) & 1]


def union_graphs(g1: HypercubeSubgraph, g2: HypercubeSubgraph) -> HypercubeSubgraph:
    if g1.d != g2.d:
        raise ValueError(f"dimension mismatch: {g1.d} vs {g2.d}")
    return HypercubeSubgraph(g1.d, g1.open | g2.open)


def is_subgraph(g1: HypercubeSubgraph, g2: HypercubeSubgraph) -> bool:
    if g1.d != g2.d:
        raise ValueError(f"dimension mismatch: {g1.d} vs {g2.d}")
    return not np.any(g1.open & ~g2.open)


def edge_count(g: HypercubeSubgraph) -> int:
    return int(popcount(g.open).sum()) // 2


def degree(g: HypercubeSubgraph, v: int) -> int:
    return int(g.open[v]).bit_count()


def induced(g: HypercubeSubgraph, keep) -> HypercubeSubgraph:
    """Keep only edges with both endpoints in the boolean mask ``keep``."""
    keep = np.asarray(keep, dtype=bool)
    masks = g.open.copy()
    idx = np.arange(g.n, dtype=np.int64)
    for i in range(g.d):
        ok = keep & keep[idx ^ (1 << i)]
        masks[~ok] &= np.uint32(~(1 << i) & 0xFFFFFFFF)
    return HypercubeSubgraph(g.d, masks)


def expand(g: HypercubeSubgraph, frontier: np.ndarray) -> np.ndarray:
    """Boolean mask of vertices joined by an open edge to ``frontier``."""
    frontier = np.asarray(frontier, dtype=bool)
    idx = np.arange(g.n, dtype=np.int64)
    out = np.zeros(g.n, dtype=bool)
    for i in range(g.d):
        has = ((g.open >> np.uint32(i)) & np.uint32(1)).astype(bool)
        out |= has & frontier[idx ^ (1 << i)]
    return out


# ---------------------------------------------------------------------------
# binary snapshots:  "QPRC" | u16 version | u16 d | u64 seed | 2**d x u32 masks

SNAPSHOT_MAGIC = b"QPRC"
SNAPSHOT_VERSION = 1
_HEADER = struct.Struct("<4sHHQ")


def save_snapshot(g: HypercubeSubgraph, path, seed: int = 0) -> None:
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(SNAPSHOT_MAGIC, SNAPSHOT_VERSION, g.d, seed & _MASK64))
        fh.write(g.open.astype("<u4").tobytes())


def load_snapshot(path) -> tuple[HypercubeSubgraph, int]:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError("truncated snapshot header")
    magic, version, d, seed = _HEADER.unpack_from(raw)
    if magic != SNAPSHOT_MAGIC:
        raise ValueError(f"bad magic {magic!r}")
    if version != SNAPSHOT_VERSION:
        raise ValueError(f"unsupported snapshot version {version}")
    body = raw[_HEADER.size:]
    if len(body) != 4 * (1 << d):
        raise ValueError("snapshot body length does not match d")
    masks = np.frombuffer(body, dtype="<u4").astype(np.uint32)
    return HypercubeSubgraph(d, masks), seed
