"""Time the compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py --vertices 1000 --repeats 3

Each kernel runs on the same synthetic sparse graph under both backends;
results are checked for agreement before timings are reported.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from contactnet import kernels
from contactnet.graph import ContactGraph
from contactnet.nullmodel import _draw


def sparse_graph(n: int, mean_degree: float, seed: int) -> ContactGraph:
    """A spanning random tree plus uniform extra edges, so the graph is connected."""
    rng = np.random.default_rng(seed)
    parent = np.array([rng.integers(0, v) for v in range(1, n)], dtype=np.int64)
    pairs = {(int(p), v) for v, p in zip(range(1, n), parent)}
    target = int(mean_degree * n / 2)
    while len(pairs) < target:
        a, b = sorted(rng.integers(0, n, size=2).tolist())
        if a != b:
            pairs.add((a, b))
    width = len(str(n))
    return ContactGraph.from_pairs([(f"v{a:0{width}d}", f"v{b:0{width}d}") for a, b in sorted(pairs)])


def best_of(fn, repeats: int) -> tuple[float, object]:
    best, out = float("inf"), None
    for _ in range(repeats):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def cases(g: ContactGraph, swaps: int):
    weights = np.ones(len(g.indices), dtype=np.int64)
    degree = g.degree.astype(np.int64)
    picks = _draw(np.random.default_rng(1), g.m, swaps)
    pos = np.random.default_rng(2).normal(size=(g.n, 2))

    def swap(mod):
        src, dst = g.edges[:, 0].copy(), g.edges[:, 1].copy()
        accepted = mod.swap_chain(src, dst, g.n, *picks)
        return accepted, src, dst

    def merge_refine(mod):
        root, merges = mod.merge_level(g.indptr, g.indices, weights, degree, g.m, 1)
        assign = np.unique(root, return_inverse=True)[1].astype(np.int64)
        moves = mod.refine(g.indptr, g.indices, weights, degree, assign, g.m, 20)
        return merges, moves, assign

    return {
        "bfs_histogram": lambda mod: mod.bfs_histogram(g.indptr, g.indices, g.n),
        "swap_chain": swap,
        "merge_level+refine": merge_refine,
        "layout_energy_grad": lambda mod: mod.layout_energy_grad(pos, g.indptr, g.indices, 1.0, True),
    }


def same(a, b) -> bool:
    if isinstance(a, tuple):
        return len(a) == len(b) and all(same(x, y) for x, y in zip(a, b))
    if isinstance(a, np.ndarray):
        return a.shape == b.shape and (np.array_equal(a, b) or np.allclose(a, b, rtol=1e-10, atol=1e-12))
    if isinstance(a, float):
        return abs(a - b) <= 1e-10 * max(1.0, abs(a))
    return a == b


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--vertices", type=int, default=1000)
    ap.add_argument("--mean-degree", type=float, default=2.6)
    ap.add_argument("--swaps", type=int, default=100_000)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", action="store_true", help="print results as JSON")
    args = ap.parse_args(argv)

    available = kernels.backends()
    if "compiled" not in available:
        print("compiled extension not built; only the python backend is available", file=sys.stderr)
    g = sparse_graph(args.vertices, args.mean_degree, args.seed)
    rows = []
    for name, fn in cases(g, args.swaps).items():
        timings, outputs = {}, {}
        for backend, mod in available.items():
            timings[backend], outputs[backend] = best_of(lambda: fn(mod), args.repeats)
        agree = all(same(outputs["python"], o) for o in outputs.values())
        speedup = timings["python"] / timings["compiled"] if "compiled" in timings else None
        rows.append({"kernel": name, "seconds": timings, "speedup": speedup, "agree": agree})

    if args.json:
        print(json.dumps({"vertices": g.n, "edges": g.m, "results": rows}, indent=2))
    else:
        print(f"graph: {g.n} vertices, {g.m} edges; best of {args.repeats}")
        print(f"{'kernel':<22}{'python s':>12}{'compiled s':>12}{'speedup':>10}  agree")
        for r in rows:
            comp = r["seconds"].get("compiled")
            print(f"{r['kernel']:<22}{r['seconds']['python']:>12.4f}"
                  f"{comp if comp is None else format(comp, '.4f'):>12}"
                  f"{'' if r['speedup'] is None else format(r['speedup'], '.1f') + 'x':>10}  {r['agree']}")
    return 0 if all(r["agree"] for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
