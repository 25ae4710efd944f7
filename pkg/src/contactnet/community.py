"""Maximal-modularity clustering with connected clusters.

The heuristic is multi-level: greedy merging of adjacent clusters by
largest modularity gain, coarsened level by level, then single-node
refinement while uncoarsening.  Merges only ever join clusters that share
an edge and refinement rejects moves that would split a cluster, so every
cluster stays connected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import EmptyGraph, MissingCovariate
from .graph import ContactGraph
from .mixing import covariate_labels, homogeneity_test, HomogeneityResult

DEFAULT_RESTARTS = 8
REDUCTION = 0.5  # cluster count shrinks by at least this factor per level
MAX_SWEEPS = 10_000


@dataclass(frozen=True)
class _Level:
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    selfw: np.ndarray
    degree: np.ndarray
    m_total: int

    @property
    def n(self) -> int:
        return len(self.degree)


def _base_level(g: ContactGraph) -> _Level:
    return _Level(g.indptr, g.indices, np.ones(len(g.indices), dtype=np.int64),
                  np.zeros(g.n, dtype=np.int64), g.degree.astype(np.int64), g.m)


def _canonical(labels: np.ndarray) -> np.ndarray:
    """Relabel clusters 0..J-1 in order of their first node."""
    _, first, inv = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inv.reshape(-1)]


def _coarsen(level: _Level, labels: np.ndarray) -> _Level:
    k = int(labels.max()) + 1
    src = np.repeat(np.arange(level.n), np.diff(level.indptr))
    cs, cd = labels[src], labels[level.indices]
    selfw = np.bincount(labels, weights=level.selfw, minlength=k).astype(np.int64)
    inner = cs == cd
    # each internal edge appears twice among the arcs
    selfw += (np.bincount(cs[inner], weights=level.weights[inner], minlength=k) // 2).astype(np.int64)
    cs, cd, w = cs[~inner], cd[~inner], level.weights[~inner]
    key = cs * k + cd
    uniq, inv = np.unique(key, return_inverse=True)
    wsum = np.bincount(inv.reshape(-1), weights=w).astype(np.int64)
    us, ud = uniq // k, uniq % k
    indptr = np.zeros(k + 1, dtype=np.int64)
    np.cumsum(np.bincount(us, minlength=k), out=indptr[1:])
    degree = np.bincount(labels, weights=level.degree, minlength=k).astype(np.int64)
    return _Level(indptr, ud.astype(np.int64), wsum, selfw, degree, level.m_total)


def _multilevel(level: _Level) -> np.ndarray:
    levels: list[tuple[_Level, np.ndarray]] = []
    current = level
    while current.n > 1:
        target = max(1, int(math.ceil(current.n * REDUCTION)))
        root, merges = kernels.merge_level(current.indptr, current.indices, current.weights,
                                           current.degree, current.m_total, target)
        if merges == 0:
            break
        labels = _canonical(root)
        levels.append((current, labels))
        current = _coarsen(current, labels)
    assign = np.arange(current.n, dtype=np.int64)
    kernels.refine(current.indptr, current.indices, current.weights, current.degree,
                   assign, current.m_total, MAX_SWEEPS)
    for lv, labels in reversed(levels):
        assign = np.ascontiguousarray(assign[labels])
        kernels.refine(lv.indptr, lv.indices, lv.weights, lv.degree, assign, lv.m_total, MAX_SWEEPS)
    return _canonical(assign)


@dataclass(frozen=True)
class Partition:
    assignment: np.ndarray
    J: int
    Q: float

    def members(self) -> list[np.ndarray]:
        order = np.argsort(self.assignment, kind="stable")
        bounds = np.searchsorted(self.assignment[order], np.arange(self.J + 1))
        return [order[bounds[c]:bounds[c + 1]] for c in range(self.J)]

    def to_csv(self, g: ContactGraph) -> str:
        ids = g.ids
        lines = ["vertex_id,cluster"] + [f"{ids[i]},{c}" for i, c in enumerate(self.assignment)]
        return "\n".join(lines) + "\n"


def modularity_numerator(g: ContactGraph, assignment: np.ndarray) -> int:
    """``Q * 4 m^2`` as an exact integer."""
    a = np.asarray(assignment)
    J = int(a.max()) + 1 if len(a) else 0
    e = g.edges
    inner = np.bincount(a[e[:, 0]][a[e[:, 0]] == a[e[:, 1]]], minlength=J).astype(np.int64)
    dc = np.bincount(a, weights=g.degree, minlength=J).astype(np.int64)
    return int(4 * g.m * int(inner.sum()) - int((dc * dc).sum()))


def partition_modularity(g: ContactGraph, assignment: np.ndarray) -> float:
    return modularity_numerator(g, assignment) / (4.0 * g.m * g.m)


def clusters_connected(g: ContactGraph, assignment: np.ndarray) -> bool:
    """Whether every cluster induces a connected subgraph."""
    a = np.asarray(assignment)
    seen = np.zeros(g.n, dtype=bool)
    done: set[int] = set()
    for s in range(g.n):
        if seen[s]:
            continue
        c = int(a[s])
        if c in done:
            return False
        done.add(c)
        seen[s] = True
        stack = [s]
        while stack:
            u = stack.pop()
            for w in g.neighbors(u):
                if not seen[w] and a[w] == c:
                    seen[w] = True
                    stack.append(w)
    return True


def _restart_rng(seed: int, task: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(task)]))


def greedy_modularity(g: ContactGraph, seed: int = 0, restarts: int = DEFAULT_RESTARTS) -> Partition:
    """Best-of-``restarts`` connected maximal-modularity partition.

    Each restart relabels the vertices with a permutation drawn from
    ``(seed, restart)``; the highest modularity wins, ties going to the
    earliest restart.  Cluster indices follow the first vertex of each
    cluster.
    """
    if g.m == 0:
        raise EmptyGraph("modularity is undefined without edges")
    best, best_num = None, None
    for r in range(max(1, restarts)):
        perm = _restart_rng(seed, r).permutation(g.n)
        labels = _multilevel(_base_level(g.permuted(perm)))
        assign = np.empty(g.n, dtype=np.int64)
        assign[perm] = labels
        assign = _canonical(assign)
        num = modularity_numerator(g, assign)
        if best_num is None or num > best_num:
            best, best_num = assign, num
    J = int(best.max()) + 1
    return Partition(best, J, best_num / (4.0 * g.m * g.m))


# -- cluster quotient --------------------------------------------------------


@dataclass
class ClusterGraph:
    sizes: list[int]
    intra_edges: list[int]
    tallies: list[dict[str, int]]
    links: dict[tuple[int, int], int]

    @property
    def J(self) -> int:
        return len(self.sizes)

    @property
    def inter_edges(self) -> int:
        return sum(self.links.values())

    def as_graph(self) -> ContactGraph:
        return ContactGraph.from_pairs(sorted(self.links), ids=range(self.J))

    def nodes_csv(self, categories: list[str]) -> str:
        rows = ["cluster,size,intra_edges," + ",".join(categories)]
        for c in range(self.J):
            rows.append(",".join(str(x) for x in
                                 [c, self.sizes[c], self.intra_edges[c]]
                                 + [self.tallies[c].get(k, 0) for k in categories]))
        return "\n".join(rows) + "\n"

    def links_csv(self) -> str:
        rows = ["cluster_a,cluster_b,multiplicity"]
        rows += [f"{a},{b},{w}" for (a, b), w in sorted(self.links.items())]
        return "\n".join(rows) + "\n"


def cluster_graph(g: ContactGraph, p: Partition, covariate: str | None = "orientation") -> ClusterGraph:
    """Quotient graph: one node per cluster, links weighted by edge multiplicity."""
    a = p.assignment
    sizes = np.bincount(a, minlength=p.J)
    intra = np.zeros(p.J, dtype=np.int64)
    links: dict[tuple[int, int], int] = {}
    for u, v in g.edges:
        cu, cv = int(a[u]), int(a[v])
        if cu == cv:
            intra[cu] += 1
        else:
            key = (cu, cv) if cu < cv else (cv, cu)
            links[key] = links.get(key, 0) + 1
    tallies: list[dict[str, int]] = [dict() for _ in range(p.J)]
    if covariate is not None:
        try:
            labs = covariate_labels(g, covariate)
        except MissingCovariate:
            labs = [None] * g.n
        for i, lab in enumerate(labs):
            key = lab if lab is not None else "U"
            t = tallies[a[i]]
            t[key] = t.get(key, 0) + 1
    return ClusterGraph(sizes.tolist(), intra.tolist(), tallies, dict(sorted(links.items())))


def resolution_limit(m: int) -> float:
    """Module size (in edges) below which modularity cannot resolve communities."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return math.sqrt(2 * m)


# -- sub-structure -----------------------------------------------------------


@dataclass
class SubclusterReport:
    parent_cluster: int
    n_vertices: int
    n_edges: int
    subpartition: Partition | None
    null_mean: float
    null_max: float
    significant: bool
    below_resolution: bool
    note: str | None = None

    @property
    def subclusters(self) -> int | None:
        return self.subpartition.J if self.significant and self.subpartition else None


def recursive_subclustering(
    g: ContactGraph,
    p: Partition,
    null_replicates: int,
    seed: int = 0,
    restarts: int = DEFAULT_RESTARTS,
    burn_in_factor: int = 20,
    thinning_factor: int = 5,
) -> list[SubclusterReport]:
    """Test every cluster for significant sub-structure (one level deep).

    A cluster is split when the best partition of its induced subgraph has
    modularity strictly above the largest modularity reached on its
    degree-preserving randomisations.
    """
    from .nullmodel import SwapChainConfig, null_modularity, significance

    if null_replicates < 1:
        raise ValueError("null_replicates must be >= 1")
    limit = resolution_limit(g.m) if g.m else 0.0
    out = []
    for c, members in enumerate(p.members()):
        sub = g.subgraph(members)
        below = sub.m < limit
        task_seed = int(np.random.SeedSequence([int(seed), c]).generate_state(1)[0])
        if sub.m < 2:
            part = greedy_modularity(sub, task_seed, restarts) if sub.m else None
            out.append(SubclusterReport(c, sub.n, sub.m, part, math.nan, math.nan, False, below,
                                        "too few edges for a null model"))
            continue
        part = greedy_modularity(sub, task_seed, restarts)
        cfg = SwapChainConfig(burn_in_factor * sub.m, thinning_factor * sub.m, null_replicates, task_seed)
        nd = null_modularity(sub, cfg, restarts=restarts)
        verdict = significance(part.Q, nd)
        out.append(SubclusterReport(c, sub.n, sub.m, part, nd.mean, nd.max,
                                    verdict.significant and part.J > 1, below))
    return out


# -- atypical clusters -------------------------------------------------------


@dataclass
class AtypicalityReport:
    covariate: str
    categories: list[str]
    reference: list[float]
    results: list[HomogeneityResult]
    labels: list[str]  # "typical" / "msm" / "mixed" (or "atypical" for other covariates)
    group_sizes: dict[str, int] = field(default_factory=dict)
    group_clusters: dict[str, int] = field(default_factory=dict)
    inter_group_edges: int = 0


def atypicality_report(g: ContactGraph, p: Partition, covariate: str = "orientation",
                       alpha: float = 0.05, mc_draws: int = 10_000, seed: int = 0) -> AtypicalityReport:
    """Per-cluster homogeneity tests against the whole-graph distribution.

    Clusters with p-value strictly below ``alpha`` are atypical.  For the
    orientation covariate they are split into an MSM group (MSM share above
    the overall share) and a mixed group (at or below it).
    """
    labs = covariate_labels(g, covariate)
    cats = sorted({x for x in labs if x is not None})
    if not cats:
        raise MissingCovariate(f"covariate {covariate!r} has no values")
    index = {c: i for i, c in enumerate(cats)}
    counts = np.zeros((p.J, len(cats)), dtype=np.int64)
    for i, lab in enumerate(labs):
        if lab is not None:
            counts[p.assignment[i], index[lab]] += 1
    total = counts.sum(axis=0)
    reference = (total / total.sum()).tolist()
    msm = index.get("MSM")
    overall = total[msm] / total.sum() if msm is not None else None
    results, labels = [], []
    for c in range(p.J):
        if counts[c].sum() == 0:
            results.append(HomogeneityResult(0.0, 0, 1.0, [0.0] * len(cats), [0] * len(cats)))
            labels.append("typical")
            continue
        res = homogeneity_test(counts[c], reference, mc_draws=mc_draws, seed=seed + c)
        results.append(res)
        if res.pvalue < alpha:
            if covariate == "orientation" and msm is not None:
                share = counts[c, msm] / counts[c].sum()
                labels.append("msm" if share > overall else "mixed")
            else:
                labels.append("atypical")
        else:
            labels.append("typical")
    sizes = np.bincount(p.assignment, minlength=p.J)
    rep = AtypicalityReport(covariate, cats, reference, results, labels)
    for name in sorted(set(labels)):
        sel = [c for c in range(p.J) if labels[c] == name]
        rep.group_clusters[name] = len(sel)
        rep.group_sizes[name] = int(sizes[sel].sum())
    if covariate == "orientation":
        vlab = np.array([labels[c] for c in p.assignment])
        e = g.edges
        a, b = vlab[e[:, 0]], vlab[e[:, 1]]
        rep.inter_group_edges = int(np.sum(((a == "msm") & (b == "mixed")) | ((a == "mixed") & (b == "msm"))))
    return rep
