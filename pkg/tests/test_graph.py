import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings

from contactnet.errors import EmptyGraph, NoTriples
from contactnet.graph import (
    ContactGraph, articulation_points, clustering_coefficient, connected_components,
    geodesic_summary, giant_component, maximal_cliques, triangle_and_triple_counts,
)
from contactnet.records import NamedBy, VertexRecord

import oracles
from conftest import graph_from_edges, small_graphs


def path(*labels):
    return ContactGraph.from_pairs(list(zip(labels, labels[1:])))


def test_adjacency_symmetric_and_degree():
    g = graph_from_edges(5, [(0, 1), (1, 2), (3, 4), (0, 2)])
    for u in range(g.n):
        for v in g.neighbors(u):
            assert u in g.neighbors(v)
        assert g.degree[u] == len(g.neighbors(u))


def test_components_examples():
    ci = connected_components(path("a", "b", "c"))
    assert ci.sizes == [3]
    ci = connected_components(ContactGraph.from_pairs([("a", "b"), ("c", "d")]))
    assert ci.sizes == [2, 2]
    assert list(ci.component_id) == [0, 0, 1, 1]  # ties broken by smallest id


def test_giant_component_examples():
    g = ContactGraph.from_pairs([("a", "b"), ("c", "d"), ("d", "e")])
    h = giant_component(g)
    assert sorted(h.ids) == ["c", "d", "e"] and h.m == 2
    p = path("a", "b", "c")
    assert giant_component(p).edge_set() == p.edge_set()
    with pytest.raises(EmptyGraph):
        giant_component(ContactGraph.from_pairs([]))


@settings(max_examples=150, deadline=None)
@given(small_graphs())
def test_component_sizes_sum_to_n(gr):
    n, edges = gr
    g = graph_from_edges(n, edges)
    ci = connected_components(g)
    assert sum(ci.sizes) == n
    assert ci.count == oracles.component_count(n, edges)
    assert giant_component(g).m <= g.m


def test_geodesic_examples():
    s = geodesic_summary(path("a", "b", "c"))
    assert s.mean_L == pytest.approx(8 / 12, abs=1e-15) and s.diameter_delta == 2
    assert s.mean_L_conventional == pytest.approx(8 / 6)
    s = geodesic_summary(ContactGraph.from_pairs([("a", "b"), ("b", "c"), ("a", "c")]))
    assert s.mean_L == 0.5 and s.diameter_delta == 1 and s.harmonic_mean == 1.0


def test_harmonic_mean_disconnected():
    # two separate edges: 4 reachable ordered pairs at distance 1 out of 12
    s = geodesic_summary(ContactGraph.from_pairs([("a", "b"), ("c", "d")]))
    assert s.harmonic_mean == pytest.approx(12 / 4)
    assert s.reachable_pairs == 4


@settings(max_examples=100, deadline=None)
@given(small_graphs(min_n=2))
def test_geodesics_match_floyd_warshall(gr):
    n, edges = gr
    g = graph_from_edges(n, edges)
    d = oracles.all_pairs_distances(n, edges)
    finite = [d[i][j] for i in range(n) for j in range(n) if i != j and d[i][j] < math.inf]
    s = geodesic_summary(g)
    assert s.reachable_pairs == len(finite)
    assert s.diameter_delta == int(max(finite, default=0))
    assert s.mean_L == pytest.approx(sum(finite) / (n * (n + 1)), abs=1e-12)
    inv = sum(1 / x for x in finite)
    if edges:
        assert s.harmonic_mean == pytest.approx(n * (n - 1) / inv)
        assert s.harmonic_mean >= 1
    for k in s.per_pair_histogram:
        assert k <= s.diameter_delta
    # symmetry and triangle inequality of the oracle distances that the histogram summarises
    for i in range(n):
        for j in range(n):
            assert d[i][j] == d[j][i]
            for k in range(n):
                assert d[i][j] <= d[i][k] + d[k][j]


def test_oriented_traversal_follows_naming():
    vs = [VertexRecord(x) for x in "abc"]
    g = ContactGraph.build(vs, [("a", "b"), ("c", "b")], [NamedBy.SRC, NamedBy.DST])
    # a -> b and b -> c: only three ordered pairs reachable
    s = geodesic_summary(g, oriented=True)
    assert s.per_pair_histogram == {1: 2, 2: 1}
    u = geodesic_summary(g, oriented=False)
    assert u.per_pair_histogram == {1: 4, 2: 2}


def test_oriented_both_and_unknown_are_two_way():
    vs = [VertexRecord(x) for x in "ab"]
    for nb in (NamedBy.BOTH, NamedBy.UNKNOWN):
        g = ContactGraph.build(vs, [("a", "b")], [nb])
        assert geodesic_summary(g, oriented=True).reachable_pairs == 2


def test_articulation_examples(two_triangles):
    assert articulation_points(path("a", "b", "c")) == {"b"}
    assert articulation_points(ContactGraph.from_pairs([("a", "b"), ("b", "c"), ("a", "c")])) == set()
    assert articulation_points(two_triangles) == {"2", "3"}


@settings(max_examples=300, deadline=None)
@given(small_graphs(max_n=10))
def test_articulation_matches_removal_oracle(gr):
    n, edges = gr
    g = graph_from_edges(n, edges)
    expect = {g.ids[v] for v in oracles.articulation_by_removal(n, edges)}
    assert articulation_points(g) == expect


def test_clustering_examples(two_triangles):
    assert clustering_coefficient(ContactGraph.from_pairs([("a", "b"), ("b", "c"), ("a", "c")])) == 1.0
    assert clustering_coefficient(ContactGraph.from_pairs([("h", "x"), ("h", "y"), ("h", "z")])) == 0.0
    tri, triples = oracles.triangles_and_triples(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)])
    assert (tri, triples) == (2, 10)
    assert clustering_coefficient(two_triangles) == pytest.approx(3 * 2 / 10)
    with pytest.raises(NoTriples):
        clustering_coefficient(ContactGraph.from_pairs([("a", "b")]))


@settings(max_examples=150, deadline=None)
@given(small_graphs())
def test_triangles_match_enumeration(gr):
    n, edges = gr
    assert triangle_and_triple_counts(graph_from_edges(n, edges)) == oracles.triangles_and_triples(n, edges)


def test_clique_examples():
    assert maximal_cliques(ContactGraph.from_pairs([("a", "b"), ("b", "c"), ("a", "c")])) == [["a", "b", "c"]]
    assert maximal_cliques(path("a", "b", "c")) == [["a", "b"], ["b", "c"]]
    k4_minus = ContactGraph.from_pairs([("a", "b"), ("a", "c"), ("a", "d"), ("b", "c"), ("b", "d")])
    assert maximal_cliques(k4_minus) == [["a", "b", "c"], ["a", "b", "d"]]


@settings(max_examples=150, deadline=None)
@given(small_graphs())
def test_cliques_match_subset_enumeration(gr):
    n, edges = gr
    g = graph_from_edges(n, edges)
    got = {frozenset(g.index_of(v) for v in c) for c in maximal_cliques(g)}
    assert got == oracles.maximal_cliques_brute(n, edges)
    for c in got:
        assert not any(c < o for o in got)
    covered = {frozenset(p) for c in got for p in itertools.combinations(sorted(c), 2)}
    assert {frozenset(e) for e in edges} <= covered


def test_subgraph_and_permutation_preserve_structure():
    g = graph_from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
    perm = np.array([4, 2, 0, 1, 3])
    h = g.permuted(perm)
    assert {frozenset((h.ids[a], h.ids[b])) for a, b in h.edges} == \
           {frozenset((g.ids[a], g.ids[b])) for a, b in g.edges}
    s = g.subgraph([0, 1, 2])
    assert s.n == 3 and s.m == 2


def test_graph_is_immutable():
    g = path("a", "b")
    with pytest.raises(ValueError):
        g.edges[0, 0] = 1
    with pytest.raises(ValueError):
        g.indices[0] = 1
