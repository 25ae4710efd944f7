import collections
import math

import numpy as np
import pytest

from contactnet.errors import ConfigError, TooFewEdges
from contactnet.graph import ContactGraph
from contactnet.nullmodel import (
    NullModularityDistribution, SwapChainConfig, chain_samples, null_modularity, rewire, significance,
)

import oracles
from conftest import graph_from_edges, random_edges


def test_forced_swap_two_edges():
    g = ContactGraph.from_pairs([("a", "b"), ("c", "d")])
    legal = [{frozenset("ac"), frozenset("bd")}, {frozenset("ad"), frozenset("bc")}]
    seen = set()
    for seed in range(40):
        h = rewire(g, 1, seed)
        es = {frozenset((h.ids[a], h.ids[b])) for a, b in h.edges}
        assert es in legal
        seen.add(frozenset(es))
    assert len(seen) == 2  # both orientations of the swap occur


def test_rewire_preserves_degrees_on_many_graphs():
    for seed in range(1000):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 16))
        edges = random_edges(rng, n, float(rng.uniform(0.1, 0.6)))
        if len(edges) < 2:
            continue
        g = graph_from_edges(n, edges)
        h = rewire(g, 5 * g.m, seed)
        assert h.n == g.n and h.m == g.m
        assert np.array_equal(np.sort(h.degree), np.sort(g.degree))
        assert np.array_equal(h.degree, g.degree)  # per vertex, not only the multiset
        e = h.edges
        assert (e[:, 0] != e[:, 1]).all()
        assert len({frozenset(map(int, x)) for x in e}) == h.m


def test_triangle_never_changes():
    tri = ContactGraph.from_pairs([("a", "b"), ("b", "c"), ("a", "c")])
    assert rewire(tri, 500, 3).edge_set() == tri.edge_set()


def test_star_every_swap_rejected():
    star = ContactGraph.from_pairs([("h", x) for x in "abcde"])
    assert rewire(star, 200, 1).edge_set() == star.edge_set()
    nd = null_modularity(star, SwapChainConfig(20, 5, 4, 0), restarts=1)
    assert len(set(nd.samples)) == 1


def test_too_few_edges():
    with pytest.raises(TooFewEdges):
        rewire(ContactGraph.from_pairs([("a", "b")]), 1)


def test_config_validation():
    with pytest.raises(ConfigError):
        SwapChainConfig(0, 5, 10)
    with pytest.raises(ConfigError):
        SwapChainConfig(10, 5, 0)
    g = ContactGraph.from_pairs([("a", "b"), ("c", "d")])
    cfg = SwapChainConfig.for_graph(g, 3, 7)
    assert (cfg.burn_in_swaps, cfg.thinning_swaps, cfg.replicates, cfg.seed) == (40, 10, 3, 7)


def test_path_chain_is_uniform():
    # every simple graph on 4 labelled vertices with degrees (1, 2, 2, 1)
    path = graph_from_edges(4, [(0, 1), (1, 2), (2, 3)])
    targets = oracles.simple_graphs_with_degrees([1, 2, 2, 1])
    assert len(targets) >= 2
    samples = 100_000
    freq = collections.Counter(chain_samples(path, samples, thinning=15, burn_in=60, seed=11))
    assert set(freq) == set(targets)
    p = 1 / len(targets)
    se = math.sqrt(p * (1 - p) / samples)
    for t in targets:
        assert abs(freq[t] / samples - p) <= 3 * se


def test_null_modularity_on_cycle():
    c4 = graph_from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    nd = null_modularity(c4, SwapChainConfig(80, 20, 1, 0), restarts=1)
    assert len(nd.samples) == 1 and -0.5 <= nd.samples[0] <= 0.5


def test_null_modularity_reproducible_and_ordered():
    rng = np.random.default_rng(3)
    g = graph_from_edges(25, random_edges(rng, 25, 0.2))
    cfg = SwapChainConfig.for_graph(g, 6, seed=5)
    a = null_modularity(g, cfg, restarts=2)
    b = null_modularity(g, cfg, restarts=2)
    assert a.samples == b.samples
    assert len(a.samples) == 6 and a.mean <= a.max
    assert a.to_csv().splitlines()[0] == "modularity" and len(a.to_csv().splitlines()) == 7


def test_replicate_streams_independent_of_count():
    # replicate r depends only on (seed, r), so a longer run extends a shorter one
    rng = np.random.default_rng(8)
    g = graph_from_edges(20, random_edges(rng, 20, 0.25))
    short = null_modularity(g, SwapChainConfig.for_graph(g, 3, seed=2), restarts=1)
    long = null_modularity(g, SwapChainConfig.for_graph(g, 5, seed=2), restarts=1)
    assert long.samples[:3] == short.samples


def make_nd(samples):
    return NullModularityDistribution(samples, sum(samples) / len(samples), max(samples),
                                      SwapChainConfig(1, 1, len(samples)))


def test_significance_rules():
    v = significance(0.8522, make_nd([0.73, 0.7435, 0.74]))
    assert v.significant and v.exceedance == 0.0
    v = significance(0.7435, make_nd([0.73, 0.7435]))
    assert not v.significant and v.exceedance == 0.5
    v = significance(0.1, make_nd([0.3, 0.4]))
    assert not v.significant and v.exceedance == 1.0
