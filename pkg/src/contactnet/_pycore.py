"""Pure-Python kernels.

Reference implementations of the hot loops.  ``_core.pyx`` mirrors every
function here with the same signature and, apart from the floating-point
layout kernel, bit-identical results.  Modularity decisions use exact
integer numerators: for total edge weight ``m`` the gain of merging
clusters ``i`` and ``j`` is ``(2*m*e_ij - d_i*d_j) / (2*m*m)``.
"""

from __future__ import annotations

import heapq
import math
from collections import deque

import numpy as np


def bfs_histogram(indptr, indices, n):
    """Ordered pairs ``(x, y)``, ``x != y``, counted by finite hop distance."""
    indptr = np.asarray(indptr).tolist()
    indices = np.asarray(indices).tolist()
    hist = [0] * max(n, 1)
    dist = [-1] * n
    for s in range(n):
        dist[s] = 0
        seen = [s]
        frontier = [s]
        d = 0
        while frontier:
            d += 1
            nxt = []
            for u in frontier:
                for k in range(indptr[u], indptr[u + 1]):
                    w = indices[k]
                    if dist[w] < 0:
                        dist[w] = d
                        nxt.append(w)
            if nxt:
                hist[d] += len(nxt)
                seen.extend(nxt)
            frontier = nxt
        for v in seen:
            dist[v] = -1
    return np.array(hist, dtype=np.int64)


def swap_chain(src, dst, n, pick_a, pick_b, flip):
    """Attempt one double-edge swap per entry of the pick arrays, in place.

    Edges ``pick_a[t]`` = (a, b) and ``pick_b[t]`` = (c, d) become (a, c),
    (b, d) when ``flip[t] == 0`` and (a, d), (b, c) otherwise; proposals that
    would create a self-loop or a duplicate edge are rejected.
    Returns the number of accepted swaps.
    """
    edges = {(min(u, v), max(u, v)) for u, v in zip(src.tolist(), dst.tolist())}
    accepted = 0
    for e1, e2, f in zip(pick_a.tolist(), pick_b.tolist(), flip.tolist()):
        a, b = int(src[e1]), int(dst[e1])
        c, d = int(src[e2]), int(dst[e2])
        if f:
            c, d = d, c
        if a == c or b == d:
            continue
        k1 = (a, c) if a < c else (c, a)
        k2 = (b, d) if b < d else (d, b)
        if k1 in edges or k2 in edges or k1 == k2:
            continue
        edges.discard((min(a, b), max(a, b)))
        edges.discard((min(c, d), max(c, d)))
        edges.add(k1)
        edges.add(k2)
        src[e1], dst[e1] = a, c
        src[e2], dst[e2] = b, d
        accepted += 1
    return accepted


def merge_level(indptr, indices, weights, degree, m_total, target):
    """Greedy agglomeration of adjacent clusters by largest modularity gain.

    Merges continue while some adjacent pair has positive gain and more than
    ``target`` clusters remain.  Ties go to the smallest ``(i, j)``; the
    survivor keeps the smaller index.  Returns ``(root, merges)`` where
    ``root[v]`` is the surviving cluster index of node ``v``.
    """
    n = len(degree)
    indptr = np.asarray(indptr).tolist()
    indices = np.asarray(indices).tolist()
    weights = np.asarray(weights).tolist()
    d = [int(x) for x in degree]
    two_m = 2 * int(m_total)
    nbr = [dict() for _ in range(n)]
    heap = []
    for u in range(n):
        nu = nbr[u]
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            nu[v] = nu.get(v, 0) + weights[k]
    for u in range(n):
        for v, w in nbr[u].items():
            if u < v:
                gain = two_m * w - d[u] * d[v]
                if gain > 0:
                    heap.append((-gain, u, v))
    heapq.heapify(heap)
    parent = list(range(n))
    alive = [True] * n
    clusters = n
    merges = 0
    while heap and clusters > target:
        neg, i, j = heapq.heappop(heap)
        if not (alive[i] and alive[j]):
            continue
        w = nbr[i].get(j)
        if w is None or two_m * w - d[i] * d[j] != -neg:
            continue
        ni, nj = nbr[i], nbr[j]
        del ni[j]
        del nj[i]
        for k, wk in nj.items():
            nk = nbr[k]
            del nk[j]
            ni[k] = ni.get(k, 0) + wk
            nk[i] = nk.get(i, 0) + wk
        nbr[j] = {}
        d[i] += d[j]
        alive[j] = False
        parent[j] = i
        clusters -= 1
        merges += 1
        for k, wk in ni.items():
            gain = two_m * wk - d[i] * d[k]
            if gain > 0:
                heapq.heappush(heap, (-gain, i, k) if i < k else (-gain, k, i))
    root = np.empty(n, dtype=np.int64)
    for v in range(n):
        r = v
        while parent[r] != r:
            r = parent[r]
        root[v] = r
    return root, merges


def _stays_connected(indptr, indices, assign, v, cluster, size):
    """Whether ``cluster`` minus node ``v`` is still connected."""
    start = -1
    for k in range(indptr[v], indptr[v + 1]):
        u = indices[k]
        if assign[u] == cluster:
            start = u
            break
    if start < 0:
        return False
    seen = {v, start}
    queue = deque([start])
    count = 1
    while queue:
        u = queue.popleft()
        for k in range(indptr[u], indptr[u + 1]):
            w = indices[k]
            if w not in seen and assign[w] == cluster:
                seen.add(w)
                count += 1
                queue.append(w)
    return count == size - 1


def refine(indptr, indices, weights, degree, assign, m_total, max_sweeps):
    """Single-node moves to adjacent clusters while modularity strictly rises.

    Nodes are visited in index order; each goes to the adjacent cluster with
    the largest gain (ties: smallest cluster index).  A move is rejected if
    it would disconnect the node's current cluster.  ``assign`` is updated
    in place; returns the number of moves.
    """
    n = len(degree)
    indptr_l = np.asarray(indptr).tolist()
    indices_l = np.asarray(indices).tolist()
    weights_l = np.asarray(weights).tolist()
    d = [int(x) for x in degree]
    a = [int(x) for x in assign]
    two_m = 2 * int(m_total)
    ncl = max(a) + 1 if n else 0
    dc = [0] * ncl
    size = [0] * ncl
    for v in range(n):
        dc[a[v]] += d[v]
        size[a[v]] += 1
    moves = 0
    for _ in range(max_sweeps):
        moved = 0
        for v in range(n):
            A = a[v]
            ew = {}
            for k in range(indptr_l[v], indptr_l[v + 1]):
                c = a[indices_l[k]]
                ew[c] = ew.get(c, 0) + weights_l[k]
            e_a = ew.get(A, 0)
            dv = d[v]
            base = dv * (dc[A] - dv)
            best_gain = 0
            best = -1
            for B, w in ew.items():
                if B == A:
                    continue
                gain = two_m * (w - e_a) + base - dv * dc[B]
                if gain > best_gain or (gain == best_gain and best >= 0 and B < best):
                    best_gain = gain
                    best = B
            if best < 0:
                continue
            if size[A] > 1 and not _stays_connected(indptr_l, indices_l, a, v, A, size[A]):
                continue
            a[v] = best
            dc[A] -= dv
            dc[best] += dv
            size[A] -= 1
            size[best] += 1
            moved += 1
        moves += moved
        if not moved:
            break
    assign[:] = a
    return moves


def layout_energy_grad(pos, indptr, indices, delta, with_grad=True):
    """Energy ``sum_{i != j} a_ij r^3 / (3 delta) - delta^2 ln r`` and its gradient.

    Returns ``(energy, grad)`` with ``grad`` of shape ``(n, 2)``, or
    ``(energy, None)`` when ``with_grad`` is false.  Raises ``ValueError``
    on coincident points.
    """
    pos = np.asarray(pos, dtype=np.float64)
    n = len(pos)
    grad = np.zeros_like(pos) if with_grad else None
    block = 512
    rep = []
    for lo in range(0, n, block):
        hi = min(n, lo + block)
        diff = pos[lo:hi, None, :] - pos[None, :, :]
        r2 = np.einsum("ijk,ijk->ij", diff, diff)
        rows = np.arange(hi - lo)
        r2[rows, rows + lo] = 1.0
        if np.any(r2 == 0.0):
            raise ValueError("coincident vertices")
        logs = np.log(r2)
        logs[rows, rows + lo] = 0.0
        # -delta^2 ln r over ordered pairs, rows lo..hi
        rep.append(-0.5 * delta * delta * math.fsum(logs.sum(axis=1)))
        if with_grad:
            coef = -(delta * delta) / r2
            coef[rows, rows + lo] = 0.0
            grad[lo:hi] += 2.0 * np.einsum("ij,ijk->ik", coef, diff)
    attr = []
    src = np.repeat(np.arange(n), np.diff(indptr))
    dst = np.asarray(indices)
    if len(dst):
        diff = pos[src] - pos[dst]
        r = np.sqrt(np.einsum("ij,ij->i", diff, diff))
        attr.append(math.fsum(r ** 3) / (3.0 * delta))
        if with_grad:
            # d/dz_i of 2 * r^3/(3 delta) per unordered pair = 2 r (z_i - z_j)/delta
            np.add.at(grad, src, (2.0 / delta) * r[:, None] * diff)
    energy = math.fsum(rep) + math.fsum(attr)
    return energy, grad
