import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from contactnet.community import (
    Partition, atypicality_report, cluster_graph, clusters_connected, greedy_modularity,
    partition_modularity, recursive_subclustering, resolution_limit,
)
from contactnet.errors import EmptyGraph, MissingCovariate
from contactnet.graph import ContactGraph
from contactnet.mixing import CovariatePartition, mixing_matrix, modularity
from contactnet.records import Orientation, VertexRecord

import oracles
from conftest import graph_from_edges, random_edges, small_graphs


def random_fixture_suite(count=100):
    """Seeded random graphs with 3..8 vertices and at least one edge."""
    out, seed = [], 0
    while len(out) < count:
        rng = np.random.default_rng(seed)
        seed += 1
        n = int(rng.integers(3, 9))
        edges = random_edges(rng, n, float(rng.uniform(0.2, 0.7)))
        if edges:
            out.append((n, edges))
    return out


def test_two_triangles_recovered(two_triangles):
    p = greedy_modularity(two_triangles, seed=0)
    assert p.assignment.tolist() == [0, 0, 0, 1, 1, 1]
    assert p.Q == 5 / 14
    cg = cluster_graph(two_triangles, p)
    assert cg.links == {(0, 1): 1} and cg.intra_edges == [3, 3]


def test_single_edge_one_cluster():
    g = ContactGraph.from_pairs([("a", "b")])
    p = greedy_modularity(g)
    assert p.J == 1 and p.Q == 0.0
    assert partition_modularity(g, np.array([0, 1])) == -0.5


def test_empty_graph_rejected():
    with pytest.raises(EmptyGraph):
        greedy_modularity(ContactGraph.from_pairs([], ids=["a", "b"]))


def test_brute_force_suite():
    worst = 0.0
    for n, edges in random_fixture_suite():
        g = graph_from_edges(n, edges)
        p = greedy_modularity(g, seed=0)
        num, den = oracles.best_modularity_numerator(n, edges)
        gap = num / den - p.Q
        worst = max(worst, gap)
        assert gap <= 0.1
        assert clusters_connected(g, p.assignment)
        if num > 0:
            assert p.Q >= 0
    assert worst >= 0


@settings(max_examples=120, deadline=None)
@given(small_graphs(min_n=2, max_n=8), st.integers(0, 2**31 - 1))
def test_partition_invariants(gr, seed):
    n, edges = gr
    if not edges:
        return
    g = graph_from_edges(n, edges)
    p = greedy_modularity(g, seed=seed, restarts=2)
    assert sorted(set(p.assignment.tolist())) == list(range(p.J))
    assert clusters_connected(g, p.assignment)
    # same Q through the covariate-mixing route
    mm = mixing_matrix(g, CovariatePartition([str(c) for c in range(p.J)], p.assignment))
    assert modularity(mm) == pytest.approx(p.Q, abs=1e-12)
    # deterministic for a fixed seed
    again = greedy_modularity(g, seed=seed, restarts=2)
    assert np.array_equal(again.assignment, p.assignment) and again.Q == p.Q
    cg = cluster_graph(g, p)
    assert sum(cg.intra_edges) + cg.inter_edges == g.m
    assert sum(cg.sizes) == n


def test_planted_partition_found():
    rng = np.random.default_rng(4)
    blocks, size = 5, 12
    edges = []
    for b in range(blocks):
        base = b * size
        edges += [(base + i, base + j) for i in range(size) for j in range(i + 1, size) if rng.random() < 0.5]
        if b:
            edges.append((base - 1, base))
    g = graph_from_edges(blocks * size, edges)
    p = greedy_modularity(g, seed=3)
    planted = np.repeat(np.arange(blocks), size)
    assert p.J == blocks
    assert p.Q >= partition_modularity(g, planted)
    # every block keeps a clear majority in one cluster
    for b in range(blocks):
        counts = np.bincount(p.assignment[b * size:(b + 1) * size])
        assert counts.max() >= size - 2


def test_single_cluster_graph():
    g = ContactGraph.from_pairs([("a", "b"), ("b", "c")])
    cg = cluster_graph(g, Partition(np.zeros(3, dtype=np.int64), 1, 0.0))
    assert cg.J == 1 and cg.links == {}


def test_cluster_tallies_and_csv(two_triangles):
    p = greedy_modularity(two_triangles)
    cg = cluster_graph(two_triangles, p)
    assert cg.tallies == [{"U": 3}, {"U": 3}]
    assert cg.links_csv() == "cluster_a,cluster_b,multiplicity\n0,1,1\n"
    assert cg.nodes_csv(["U"]).splitlines()[1] == "0,3,3,3"
    assert p.to_csv(two_triangles).splitlines()[:2] == ["vertex_id,cluster", "0,0"]


@pytest.mark.parametrize("m,expect", [(2, 2.0), (50, 10.0)])
def test_resolution_limit(m, expect):
    assert resolution_limit(m) == expect


def test_resolution_limit_large_graph_value():
    assert resolution_limit(3168) == pytest.approx(79.6, abs=0.05)


def test_clique_cluster_not_split():
    k5 = graph_from_edges(5, [(i, j) for i in range(5) for j in range(i + 1, 5)])
    p = Partition(np.zeros(5, dtype=np.int64), 1, 0.0)
    (rep,) = recursive_subclustering(k5, p, null_replicates=5, seed=0, restarts=2)
    assert not rep.significant and rep.subclusters is None
    assert rep.null_max == 0.0


def test_subclustering_finds_planted_substructure():
    # one cluster made of two dense blocks joined by a single edge
    rng = np.random.default_rng(9)
    edges = [(i, j) for i in range(16) for j in range(i + 1, 16)
             if (i < 8) == (j < 8) and rng.random() < 0.8]
    edges.append((7, 8))
    g = graph_from_edges(16, edges)
    p = Partition(np.zeros(16, dtype=np.int64), 1, 0.0)
    (rep,) = recursive_subclustering(g, p, null_replicates=10, seed=1, restarts=2)
    assert rep.significant and rep.subclusters == 2
    assert rep.subpartition.Q > rep.null_max


def test_significance_implies_subpartition():
    rng = np.random.default_rng(1)
    g = graph_from_edges(30, random_edges(rng, 30, 0.15))
    from contactnet.graph import giant_component
    g = giant_component(g)
    p = greedy_modularity(g, seed=0, restarts=2)
    for rep in recursive_subclustering(g, p, null_replicates=3, seed=0, restarts=1):
        if rep.significant:
            assert rep.subpartition is not None and rep.subpartition.Q > rep.null_max


def orientation_graph(orients, edges):
    vs = [VertexRecord(str(i), orientation=o) for i, o in enumerate(orients)]
    return ContactGraph.build(vs, [(str(a), str(b)) for a, b in edges])


def test_atypicality_typical_when_equal_to_reference():
    F, H, M = Orientation.WOMAN, Orientation.HETEROSEXUAL_MAN, Orientation.MSM
    g = orientation_graph([F, H, M, F, H, M], [(0, 1), (1, 2), (3, 4), (4, 5)])
    p = Partition(np.array([0, 0, 0, 1, 1, 1]), 2, 0.5)
    rep = atypicality_report(g, p)
    assert rep.labels == ["typical", "typical"]
    assert all(r.pvalue == pytest.approx(1.0) for r in rep.results)


def test_atypicality_groups_and_boundary():
    F, M = Orientation.WOMAN, Orientation.MSM
    orients = [M] * 20 + [F] * 20 + [M] * 10 + [F] * 10
    edges = [(i, i + 1) for i in range(19)] + [(i, i + 1) for i in range(20, 39)] \
        + [(i, i + 1) for i in range(40, 59)] + [(19, 20), (39, 40)]
    g = orientation_graph(orients, edges)
    p = Partition(np.repeat([0, 1, 2], 20), 3, 0.0)
    rep = atypicality_report(g, p, mc_draws=0)
    assert rep.labels == ["msm", "mixed", "typical"]
    assert rep.group_sizes == {"mixed": 20, "msm": 20, "typical": 20}
    assert rep.inter_group_edges == 1  # edge 19-20 joins the two atypical clusters
    # a p-value exactly at the threshold stays typical
    p0 = rep.results[0].pvalue
    at = atypicality_report(g, p, alpha=p0, mc_draws=0)
    assert at.labels[0] == "typical"


def test_atypicality_missing_covariate(two_triangles):
    with pytest.raises(MissingCovariate):
        atypicality_report(two_triangles, greedy_modularity(two_triangles))
