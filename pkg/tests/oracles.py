"""Independent brute-force references.

Nothing here imports the package's algorithms: each function recomputes a
quantity from its definition with plain Python so tests compare two
separate routes to the same number.
"""

from __future__ import annotations

import itertools
import math
from collections import deque
from fractions import Fraction


def adjacency(n: int, edges) -> list[set[int]]:
    adj = [set() for _ in range(n)]
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    return adj


def component_count(n: int, edges, removed: set[int] = frozenset()) -> int:
    adj = adjacency(n, edges)
    seen = set(removed)
    count = 0
    for s in range(n):
        if s in seen:
            continue
        count += 1
        seen.add(s)
        stack = [s]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
    return count


def articulation_by_removal(n: int, edges) -> set[int]:
    base = component_count(n, edges)
    out = set()
    for v in range(n):
        # removing an isolated vertex lowers the count; that is not a cut
        if not any(v in e for e in edges):
            continue
        if component_count(n, edges, {v}) > base:
            out.add(v)
    return out


def all_pairs_distances(n: int, edges) -> list[list[float]]:
    """Floyd-Warshall on unit weights."""
    d = [[0.0 if i == j else math.inf for j in range(n)] for i in range(n)]
    for a, b in edges:
        d[a][b] = d[b][a] = 1.0
    for k in range(n):
        for i in range(n):
            dik = d[i][k]
            if dik == math.inf:
                continue
            for j in range(n):
                if dik + d[k][j] < d[i][j]:
                    d[i][j] = dik + d[k][j]
    return d


def triangles_and_triples(n: int, edges) -> tuple[int, int]:
    """Triangles by vertex triples; connected triples by (centre, unordered pair)."""
    adj = adjacency(n, edges)
    tri = sum(1 for a, b, c in itertools.combinations(range(n), 3)
              if b in adj[a] and c in adj[a] and c in adj[b])
    triples = 0
    for v in range(n):
        for a, b in itertools.combinations(sorted(adj[v]), 2):
            triples += 1
    return tri, triples


def maximal_cliques_brute(n: int, edges) -> set[frozenset]:
    adj = adjacency(n, edges)
    cliques = []
    for r in range(1, n + 1):
        for sub in itertools.combinations(range(n), r):
            if all(b in adj[a] for a, b in itertools.combinations(sub, 2)):
                cliques.append(frozenset(sub))
    return {c for c in cliques if not any(c < o for o in cliques)}


def set_partitions(items):
    """All set partitions of a list (Bell-number many)."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]
        yield [[first]] + part


def modularity_exact(n: int, edges, blocks) -> Fraction:
    """Q = sum_c (e_c / m - (d_c / 2m)^2) as an exact fraction."""
    m = len(edges)
    label = {}
    for c, block in enumerate(blocks):
        for v in block:
            label[v] = c
    deg = [0] * n
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    q = Fraction(0)
    for c, block in enumerate(blocks):
        inner = sum(1 for a, b in edges if label[a] == c and label[b] == c)
        dc = sum(deg[v] for v in block)
        q += Fraction(inner, m) - Fraction(dc, 2 * m) ** 2
    return q


def best_modularity(n: int, edges) -> Fraction:
    return max(modularity_exact(n, edges, p) for p in set_partitions(range(n)))


def simple_graphs_with_degrees(degrees) -> list[frozenset]:
    """Every simple labelled graph realising the degree sequence."""
    n = len(degrees)
    pairs = list(itertools.combinations(range(n), 2))
    m = sum(degrees) // 2
    out = []
    for chosen in itertools.combinations(pairs, m):
        deg = [0] * n
        for a, b in chosen:
            deg[a] += 1
            deg[b] += 1
        if deg == list(degrees):
            out.append(frozenset(chosen))
    return out


def kl_direct(tail: dict[int, float], alpha: float, normaliser: float) -> float:
    """sum_k q_k ln(q_k / (k^-alpha / C)) with the tail renormalised."""
    total = sum(tail.values())
    return sum((w / total) * math.log((w / total) / (k ** -alpha / normaliser)) for k, w in tail.items() if w > 0)


def layout_energy_direct(pos, edges, delta: float) -> float:
    adj = adjacency(len(pos), edges)
    e = 0.0
    for i in range(len(pos)):
        for j in range(len(pos)):
            if i == j:
                continue
            r = math.dist(pos[i], pos[j])
            e += (r ** 3 / (3 * delta) if j in adj[i] else 0.0) - delta ** 2 * math.log(r)
    return e


def chi2_direct(observed, expected) -> float:
    return sum((o - e) ** 2 / e for o, e in zip(observed, expected))


def bfs_distances(adj: list[set[int]], s: int) -> dict[int, int]:
    dist = {s: 0}
    q = deque([s])
    while q:
        u = q.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                q.append(v)
    return dist


def best_modularity_numerator(n: int, edges) -> tuple[int, int]:
    """Exhaustive max of ``4 m^2 Q`` (an integer) and the matching denominator ``4 m^2``."""
    m = len(edges)
    deg = [0] * n
    for a, b in edges:
        deg[a] += 1
        deg[b] += 1
    best = None
    for blocks in set_partitions(range(n)):
        label = [0] * n
        for c, block in enumerate(blocks):
            for v in block:
                label[v] = c
        inner = sum(1 for a, b in edges if label[a] == label[b])
        sq = sum(sum(deg[v] for v in block) ** 2 for block in blocks)
        val = 4 * m * inner - sq
        if best is None or val > best:
            best = val
    return best, 4 * m * m
