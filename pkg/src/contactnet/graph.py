"""Immutable contact graph and structural algorithms.

Vertices are addressed internally by their index ``0..n-1`` in the order of
the vertex table; public results that name vertices use the string ids.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .errors import EmptyGraph, NoTriples, DuplicateEdge, SelfLoop, DanglingEndpoint, DuplicateVertexId
from .records import NamedBy, VertexRecord


def _csr(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """CSR arrays for arcs ``src -> dst`` with sorted neighbour lists."""
    order = np.lexsort((dst, src))
    indices = np.ascontiguousarray(dst[order], dtype=np.int64)
    counts = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, indices


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class ContactGraph:
    """Undirected simple graph with per-vertex covariates.

    ``edges`` holds vertex-index pairs in their original ``(src, dst)``
    orientation; ``named_by`` (optional) records who named whom.
    """

    vertices: tuple[VertexRecord, ...]
    edges: np.ndarray
    named_by: tuple[NamedBy, ...] | None = None
    indptr: np.ndarray = field(init=False, repr=False)
    indices: np.ndarray = field(init=False, repr=False)
    _index: dict = field(init=False, repr=False)

    def __post_init__(self):
        n = len(self.vertices)
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "edges", _frozen(edges.copy()))
        src = np.concatenate([edges[:, 0], edges[:, 1]])
        dst = np.concatenate([edges[:, 1], edges[:, 0]])
        indptr, indices = _csr(n, src, dst)
        object.__setattr__(self, "indptr", _frozen(indptr))
        object.__setattr__(self, "indices", _frozen(indices))
        object.__setattr__(self, "_index", {v.id: i for i, v in enumerate(self.vertices)})

    # -- construction -------------------------------------------------------

    @classmethod
    def build(
        cls,
        vertices: Sequence[VertexRecord],
        pairs: Iterable[tuple[str, str]],
        named_by: Sequence[NamedBy] | None = None,
    ) -> "ContactGraph":
        """Validate and build a graph from vertex records and id pairs."""
        index: dict[str, int] = {}
        for row, v in enumerate(vertices, start=1):
            if not v.id:
                raise DuplicateVertexId("empty vertex id", row)
            if v.id in index:
                raise DuplicateVertexId(f"duplicate vertex id {v.id!r}", row)
            index[v.id] = row - 1
        seen: set[tuple[int, int]] = set()
        out = []
        for row, (a, b) in enumerate(pairs, start=1):
            if a == b:
                raise SelfLoop(f"self-loop on {a!r}", row)
            try:
                i, j = index[a], index[b]
            except KeyError as exc:
                raise DanglingEndpoint(f"unknown endpoint {exc.args[0]!r}", row) from None
            key = (i, j) if i < j else (j, i)
            if key in seen:
                raise DuplicateEdge(f"duplicate edge {a!r}-{b!r}", row)
            seen.add(key)
            out.append((i, j))
        return cls(tuple(vertices), np.array(out, dtype=np.int64).reshape(-1, 2),
                   tuple(named_by) if named_by is not None else None)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple], ids: Iterable | None = None) -> "ContactGraph":
        """Covariate-free graph from vertex label pairs (handy for fixtures)."""
        pairs = [(str(a), str(b)) for a, b in pairs]
        if ids is None:
            ids = []
            for a, b in pairs:
                ids.extend((a, b))
            ids = list(dict.fromkeys(ids))
        return cls.build([VertexRecord(str(i)) for i in ids], pairs)

    # -- accessors ----------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def ids(self) -> list[str]:
        return [v.id for v in self.vertices]

    def index_of(self, vid: str) -> int:
        return self._index[vid]

    @property
    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def has_edge(self, i: int, j: int) -> bool:
        nb = self.neighbors(i)
        k = np.searchsorted(nb, j)
        return bool(k < len(nb) and nb[k] == j)

    def edge_set(self) -> set[frozenset]:
        ids = self.ids
        return {frozenset((ids[a], ids[b])) for a, b in self.edges}

    def subgraph(self, idx: Iterable[int]) -> "ContactGraph":
        """Induced subgraph on the given vertex indices (kept in ascending order)."""
        keep = np.unique(np.asarray(list(idx), dtype=np.int64))
        remap = np.full(self.n, -1, dtype=np.int64)
        remap[keep] = np.arange(len(keep))
        e = self.edges
        mask = (remap[e[:, 0]] >= 0) & (remap[e[:, 1]] >= 0) if len(e) else np.zeros(0, bool)
        sub = remap[e[mask]] if len(e) else e
        nb = None
        if self.named_by is not None:
            nb = tuple(x for x, ok in zip(self.named_by, mask) if ok)
        return ContactGraph(tuple(self.vertices[i] for i in keep), sub, nb)

    def permuted(self, perm: np.ndarray) -> "ContactGraph":
        """Relabel so that new vertex ``k`` is old vertex ``perm[k]``."""
        inv = np.empty_like(perm)
        inv[perm] = np.arange(len(perm))
        return ContactGraph(tuple(self.vertices[i] for i in perm), inv[self.edges], self.named_by)

    def arcs(self, oriented: bool = False) -> tuple[np.ndarray, np.ndarray]:
        """CSR adjacency, optionally following naming direction.

        ``SRC`` edges are traversed src->dst, ``DST`` edges dst->src, and
        ``BOTH``/``UNKNOWN`` edges both ways.
        """
        if not oriented:
            return self.indptr, self.indices
        if self.named_by is None:
            raise ValueError("graph carries no edge orientation")
        fwd = np.array([nb is not NamedBy.DST for nb in self.named_by], dtype=bool)
        bwd = np.array([nb is not NamedBy.SRC for nb in self.named_by], dtype=bool)
        e = self.edges
        src = np.concatenate([e[fwd, 0], e[bwd, 1]])
        dst = np.concatenate([e[fwd, 1], e[bwd, 0]])
        return _csr(self.n, src, dst)


# -- components -------------------------------------------------------------


@dataclass(frozen=True)
class ComponentIndex:
    component_id: np.ndarray  # per vertex; components numbered by decreasing size
    sizes: list[int]

    @property
    def count(self) -> int:
        return len(self.sizes)


def connected_components(g: ContactGraph) -> ComponentIndex:
    """Label components by breadth-first search.

    Component ids are assigned in order of decreasing size; equal-sized
    components are ordered by their smallest vertex id.
    """
    raw = np.full(g.n, -1, dtype=np.int64)
    ncomp = 0
    for s in range(g.n):
        if raw[s] >= 0:
            continue
        raw[s] = ncomp
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for w in g.neighbors(u):
                if raw[w] < 0:
                    raw[w] = ncomp
                    queue.append(w)
        ncomp += 1
    sizes = np.bincount(raw, minlength=ncomp)
    ids = g.ids
    min_id = [None] * ncomp
    for i, c in enumerate(raw):
        if min_id[c] is None or ids[i] < min_id[c]:
            min_id[c] = ids[i]
    order = sorted(range(ncomp), key=lambda c: (-sizes[c], min_id[c]))
    rank = np.empty(ncomp, dtype=np.int64)
    rank[order] = np.arange(ncomp)
    return ComponentIndex(rank[raw] if g.n else raw, [int(sizes[c]) for c in order])


def giant_component(g: ContactGraph) -> ContactGraph:
    if g.n == 0:
        raise EmptyGraph("graph has no vertices")
    ci = connected_components(g)
    return g.subgraph(np.flatnonzero(ci.component_id == 0))


# -- geodesics --------------------------------------------------------------


@dataclass(frozen=True)
class GeodesicSummary:
    mean_L: float
    mean_L_conventional: float
    harmonic_mean: float
    diameter_delta: int
    per_pair_histogram: dict[int, int]
    reachable_pairs: int


def distance_histogram(g: ContactGraph, oriented: bool = False) -> np.ndarray:
    """Counts of ordered pairs ``x != y`` at each finite distance (index = distance)."""
    indptr, indices = g.arcs(oriented)
    return kernels.bfs_histogram(indptr, indices, g.n)


def geodesic_summary(g: ContactGraph, oriented: bool = False) -> GeodesicSummary:
    """All-pairs geodesic statistics from one BFS sweep per source.

    ``mean_L`` keeps the normalization ``1/(n(n+1))`` over all ordered pairs
    (self pairs included); ``mean_L_conventional`` divides the same sum by
    ``n(n-1)``.  Unreachable pairs are left out of both sums and contribute
    zero to the harmonic mean.
    """
    n = g.n
    if n == 0:
        raise EmptyGraph("graph has no vertices")
    hist = distance_histogram(g, oriented)
    d = np.arange(len(hist))
    total = int((hist * d).sum())
    pos = np.flatnonzero(hist)
    diameter = int(pos.max()) if len(pos) else 0
    inv = math.fsum(float(hist[k]) / k for k in pos)
    harmonic = (n * (n - 1)) / inv if inv > 0 else math.inf
    return GeodesicSummary(
        mean_L=total / (n * (n + 1)),
        mean_L_conventional=total / (n * (n - 1)) if n > 1 else 0.0,
        harmonic_mean=harmonic,
        diameter_delta=diameter,
        per_pair_histogram={int(k): int(hist[k]) for k in pos},
        reachable_pairs=int(hist.sum()),
    )


# -- articulation points ----------------------------------------------------


def articulation_points(g: ContactGraph) -> set[str]:
    """Cut vertices via iterative low-link DFS (Hopcroft-Tarjan)."""
    n = g.n
    disc = np.full(n, -1, dtype=np.int64)
    low = np.zeros(n, dtype=np.int64)
    cut = np.zeros(n, dtype=bool)
    indptr, indices = g.indptr, g.indices
    t = 0
    for root in range(n):
        if disc[root] >= 0:
            continue
        disc[root] = low[root] = t
        t += 1
        root_children = 0
        # frames: (vertex, parent, next neighbour offset)
        stack = [[root, -1, indptr[root]]]
        while stack:
            frame = stack[-1]
            u, parent, k = frame
            if k < indptr[u + 1]:
                frame[2] = k + 1
                w = indices[k]
                if disc[w] < 0:
                    disc[w] = low[w] = t
                    t += 1
                    if u == root:
                        root_children += 1
                    stack.append([w, u, indptr[w]])
                elif w != parent:
                    low[u] = min(low[u], disc[w])
            else:
                stack.pop()
                if parent >= 0:
                    low[parent] = min(low[parent], low[u])
                    if parent != root and low[u] >= disc[parent]:
                        cut[parent] = True
        if root_children > 1:
            cut[root] = True
    ids = g.ids
    return {ids[i] for i in np.flatnonzero(cut)}


# -- clustering coefficient and cliques -------------------------------------


def triangle_and_triple_counts(g: ContactGraph) -> tuple[int, int]:
    nbrs = [set(g.neighbors(i).tolist()) for i in range(g.n)]
    tri = 0
    for u, v in g.edges:
        tri += len(nbrs[u] & nbrs[v])
    tri //= 3
    deg = g.degree
    triples = int((deg * (deg - 1) // 2).sum())
    return tri, triples


def clustering_coefficient(g: ContactGraph) -> float:
    """Global transitivity ``3 * triangles / connected triples``."""
    tri, triples = triangle_and_triple_counts(g)
    if triples == 0:
        raise NoTriples("graph has no path of length 2")
    return 3.0 * tri / triples


def maximal_cliques(g: ContactGraph) -> list[list[str]]:
    """All maximal cliques (Bron-Kerbosch with Tomita pivoting).

    Each clique is sorted; the list is sorted by decreasing size then
    lexicographically.  Isolated vertices form singleton cliques.
    """
    nbrs = [set(g.neighbors(i).tolist()) for i in range(g.n)]
    found: list[list[int]] = []
    # iterative to survive deep recursion on large cliques
    stack = [(set(), set(range(g.n)), set())]
    while stack:
        r, p, x = stack.pop()
        if not p:
            if not x:
                found.append(sorted(r))
            continue
        pivot = max(p | x, key=lambda u: len(p & nbrs[u]))
        for v in sorted(p - nbrs[pivot]):
            stack.append((r | {v}, p & nbrs[v], x & nbrs[v]))
            p = p - {v}
            x = x | {v}
    ids = g.ids
    cliques = [sorted(ids[i] for i in c) for c in found]
    cliques.sort(key=lambda c: (-len(c), c))
    return cliques
