"""Compiled and pure-Python kernels must agree."""

import numpy as np
import pytest

from contactnet import _pycore, kernels
from contactnet.community import greedy_modularity
from contactnet.nullmodel import _draw

from conftest import graph_from_edges, random_edges

compiled = kernels.backends().get("compiled")
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled extension not built")


def graphs(count=40, seed=0):
    for t in range(count):
        rng = np.random.default_rng(seed + t)
        n = int(rng.integers(2, 40))
        yield graph_from_edges(n, random_edges(rng, n, float(rng.uniform(0.05, 0.4))))


def test_backend_name_matches_module():
    assert kernels.BACKEND in ("compiled", "python")
    assert (kernels.BACKEND == "compiled") == (kernels.bfs_histogram is not _pycore.bfs_histogram)


@needs_compiled
def test_bfs_parity():
    for g in graphs():
        a = _pycore.bfs_histogram(g.indptr, g.indices, g.n)
        b = compiled.bfs_histogram(g.indptr, g.indices, g.n)
        assert np.array_equal(a, b)


@needs_compiled
def test_swap_parity():
    for g in graphs():
        if g.m < 2:
            continue
        picks = _draw(np.random.default_rng(g.m), g.m, 10 * g.m)
        s1, d1 = g.edges[:, 0].copy(), g.edges[:, 1].copy()
        s2, d2 = s1.copy(), d1.copy()
        n1 = _pycore.swap_chain(s1, d1, g.n, *picks)
        n2 = compiled.swap_chain(s2, d2, g.n, *picks)
        assert n1 == n2 and np.array_equal(s1, s2) and np.array_equal(d1, d2)


@needs_compiled
def test_merge_and_refine_parity():
    for g in graphs():
        if g.m == 0:
            continue
        w = np.ones(len(g.indices), dtype=np.int64)
        deg = g.degree.astype(np.int64)
        for target in (1, max(1, g.n // 2)):
            r1 = _pycore.merge_level(g.indptr, g.indices, w, deg, g.m, target)
            r2 = compiled.merge_level(g.indptr, g.indices, w, deg, g.m, target)
            assert np.array_equal(r1[0], r2[0]) and r1[1] == r2[1]
        start = np.random.default_rng(g.n).integers(0, 3, size=g.n).astype(np.int64)
        a1, a2 = start.copy(), start.copy()
        m1 = _pycore.refine(g.indptr, g.indices, w, deg, a1, g.m, 20)
        m2 = compiled.refine(g.indptr, g.indices, w, deg, a2, g.m, 20)
        assert m1 == m2 and np.array_equal(a1, a2)


@needs_compiled
def test_layout_parity():
    for g in graphs(count=20):
        pos = np.random.default_rng(g.n).normal(size=(g.n, 2))
        e1, g1 = _pycore.layout_energy_grad(pos, g.indptr, g.indices, 1.3, True)
        e2, g2 = compiled.layout_energy_grad(pos, g.indptr, g.indices, 1.3, True)
        assert e1 == pytest.approx(e2, rel=1e-12, abs=1e-12)
        assert np.allclose(g1, g2, rtol=1e-11, atol=1e-12)


@needs_compiled
def test_greedy_partition_identical_across_backends(monkeypatch):
    for g in graphs(count=15, seed=50):
        if g.m == 0:
            continue
        fast = greedy_modularity(g, seed=1, restarts=3)
        with monkeypatch.context() as mp:
            mp.setattr(kernels, "merge_level", _pycore.merge_level)
            mp.setattr(kernels, "refine", _pycore.refine)
            slow = greedy_modularity(g, seed=1, restarts=3)
        assert np.array_equal(fast.assignment, slow.assignment) and fast.Q == slow.Q
