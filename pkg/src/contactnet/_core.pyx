# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled kernels; see ``_pycore`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, sqrt
from libcpp.vector cimport vector
from libcpp.unordered_map cimport unordered_map
from libcpp.unordered_set cimport unordered_set
from libcpp.queue cimport priority_queue
from libcpp.pair cimport pair
from cython.operator cimport dereference as deref, preincrement as inc

ctypedef long long i64
ctypedef pair[i64, pair[i64, i64]] entry

cnp.import_array()


def bfs_histogram(indptr, indices, Py_ssize_t n):
    cdef const i64[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const i64[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    hist_arr = np.zeros(max(n, 1), dtype=np.int64)
    cdef i64[::1] hist = hist_arr
    cdef i64[::1] dist = np.full(max(n, 1), -1, dtype=np.int64)
    cdef i64[::1] queue = np.empty(max(n, 1), dtype=np.int64)
    cdef Py_ssize_t s, head, tail, k, t
    cdef i64 u, w, du
    with nogil:
        for s in range(n):
            dist[s] = 0
            queue[0] = s
            head = 0
            tail = 1
            while head < tail:
                u = queue[head]
                head += 1
                du = dist[u] + 1
                for k in range(ip[u], ip[u + 1]):
                    w = ix[k]
                    if dist[w] < 0:
                        dist[w] = du
                        hist[du] += 1
                        queue[tail] = w
                        tail += 1
            for t in range(tail):
                dist[queue[t]] = -1
    return hist_arr


cdef inline i64 _key(i64 u, i64 v, i64 n) nogil:
    if u < v:
        return u * n + v
    return v * n + u


def swap_chain(src, dst, i64 n, pick_a, pick_b, flip):
    cdef i64[::1] s = src
    cdef i64[::1] d = dst
    cdef const i64[::1] pa = np.ascontiguousarray(pick_a, dtype=np.int64)
    cdef const i64[::1] pb = np.ascontiguousarray(pick_b, dtype=np.int64)
    cdef const i64[::1] fl = np.ascontiguousarray(flip, dtype=np.int64)
    cdef unordered_set[i64] edges
    cdef Py_ssize_t t, m = s.shape[0]
    cdef i64 a, b, c, dd, e1, e2, k1, k2, tmp, accepted = 0
    with nogil:
        edges.reserve(2 * m + 1)
        for t in range(m):
            edges.insert(_key(s[t], d[t], n))
        for t in range(pa.shape[0]):
            e1 = pa[t]
            e2 = pb[t]
            a = s[e1]
            b = d[e1]
            c = s[e2]
            dd = d[e2]
            if fl[t]:
                tmp = c
                c = dd
                dd = tmp
            if a == c or b == dd:
                continue
            k1 = _key(a, c, n)
            k2 = _key(b, dd, n)
            if k1 == k2 or edges.count(k1) or edges.count(k2):
                continue
            edges.erase(_key(a, b, n))
            edges.erase(_key(c, dd, n))
            edges.insert(k1)
            edges.insert(k2)
            s[e1] = a
            d[e1] = c
            s[e2] = b
            d[e2] = dd
            accepted += 1
    return accepted


def merge_level(indptr, indices, weights, degree, i64 m_total, i64 target):
    cdef const i64[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const i64[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef const i64[::1] wt = np.ascontiguousarray(weights, dtype=np.int64)
    cdef i64[::1] d = np.array(degree, dtype=np.int64, copy=True)
    cdef Py_ssize_t n = d.shape[0]
    cdef i64 two_m = 2 * m_total
    cdef vector[unordered_map[i64, i64]] nbr = vector[unordered_map[i64, i64]](n)
    cdef priority_queue[entry] heap
    cdef i64[::1] parent = np.arange(n, dtype=np.int64)
    cdef cnp.uint8_t[::1] alive = np.ones(n, dtype=np.uint8)
    cdef i64 clusters = n, merges = 0
    cdef i64 u, v, k, i, j, w, wk, gain
    cdef Py_ssize_t p
    cdef entry top
    cdef unordered_map[i64, i64].iterator it
    with nogil:
        for u in range(n):
            for p in range(ip[u], ip[u + 1]):
                nbr[u][ix[p]] += wt[p]
        for u in range(n):
            it = nbr[u].begin()
            while it != nbr[u].end():
                v = deref(it).first
                if u < v:
                    gain = two_m * deref(it).second - d[u] * d[v]
                    if gain > 0:
                        heap.push(entry(gain, pair[i64, i64](-u, -v)))
                inc(it)
        while not heap.empty() and clusters > target:
            top = heap.top()
            heap.pop()
            i = -top.second.first
            j = -top.second.second
            if not (alive[i] and alive[j]):
                continue
            it = nbr[i].find(j)
            if it == nbr[i].end():
                continue
            w = deref(it).second
            if two_m * w - d[i] * d[j] != top.first:
                continue
            nbr[i].erase(j)
            nbr[j].erase(i)
            it = nbr[j].begin()
            while it != nbr[j].end():
                k = deref(it).first
                wk = deref(it).second
                nbr[k].erase(j)
                nbr[i][k] += wk
                nbr[k][i] += wk
                inc(it)
            nbr[j].clear()
            d[i] += d[j]
            alive[j] = 0
            parent[j] = i
            clusters -= 1
            merges += 1
            it = nbr[i].begin()
            while it != nbr[i].end():
                k = deref(it).first
                gain = two_m * deref(it).second - d[i] * d[k]
                if gain > 0:
                    if i < k:
                        heap.push(entry(gain, pair[i64, i64](-i, -k)))
                    else:
                        heap.push(entry(gain, pair[i64, i64](-k, -i)))
                inc(it)
    root = np.empty(n, dtype=np.int64)
    cdef i64[::1] rt = root
    for v in range(n):
        u = v
        while parent[u] != u:
            u = parent[u]
        rt[v] = u
    return root, merges


cdef bint _stays_connected(const i64[::1] ip, const i64[::1] ix, i64[::1] a, i64 v, i64 cluster,
                           i64 size, i64[::1] mark, i64 stamp, i64[::1] queue) nogil:
    cdef i64 start = -1, u, w, head = 0, tail = 0, count
    cdef Py_ssize_t k
    for k in range(ip[v], ip[v + 1]):
        if a[ix[k]] == cluster:
            start = ix[k]
            break
    if start < 0:
        return False
    mark[v] = stamp
    mark[start] = stamp
    queue[0] = start
    tail = 1
    count = 1
    while head < tail:
        u = queue[head]
        head += 1
        for k in range(ip[u], ip[u + 1]):
            w = ix[k]
            if mark[w] != stamp and a[w] == cluster:
                mark[w] = stamp
                count += 1
                queue[tail] = w
                tail += 1
    return count == size - 1


def refine(indptr, indices, weights, degree, assign, i64 m_total, i64 max_sweeps):
    cdef const i64[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const i64[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef const i64[::1] wt = np.ascontiguousarray(weights, dtype=np.int64)
    cdef const i64[::1] d = np.ascontiguousarray(degree, dtype=np.int64)
    cdef i64[::1] a = assign
    cdef Py_ssize_t n = d.shape[0]
    cdef i64 ncl = (max(assign) + 1) if n else 0
    cdef i64[::1] dc = np.zeros(max(ncl, 1), dtype=np.int64)
    cdef i64[::1] size = np.zeros(max(ncl, 1), dtype=np.int64)
    cdef i64[::1] acc = np.zeros(max(ncl, 1), dtype=np.int64)
    cdef i64[::1] touched = np.empty(max(n, 1), dtype=np.int64)
    cdef i64[::1] mark = np.full(max(n, 1), -1, dtype=np.int64)
    cdef i64[::1] queue = np.empty(max(n, 1), dtype=np.int64)
    cdef i64 two_m = 2 * m_total
    cdef i64 v, A, B, c, ntouch, e_a, dv, base, gain, best_gain, best, moved, moves = 0, stamp = 0, sweep
    cdef Py_ssize_t k, t
    with nogil:
        for v in range(n):
            dc[a[v]] += d[v]
            size[a[v]] += 1
        for sweep in range(max_sweeps):
            moved = 0
            for v in range(n):
                A = a[v]
                ntouch = 0
                for k in range(ip[v], ip[v + 1]):
                    c = a[ix[k]]
                    if acc[c] == 0:
                        touched[ntouch] = c
                        ntouch += 1
                    acc[c] += wt[k]
                e_a = acc[A]
                dv = d[v]
                base = dv * (dc[A] - dv)
                best_gain = 0
                best = -1
                for t in range(ntouch):
                    B = touched[t]
                    if B == A:
                        continue
                    gain = two_m * (acc[B] - e_a) + base - dv * dc[B]
                    if gain > best_gain or (gain == best_gain and best >= 0 and B < best):
                        best_gain = gain
                        best = B
                for t in range(ntouch):
                    acc[touched[t]] = 0
                if best < 0:
                    continue
                if size[A] > 1:
                    stamp += 1
                    if not _stays_connected(ip, ix, a, v, A, size[A], mark, stamp, queue):
                        continue
                a[v] = best
                dc[A] -= dv
                dc[best] += dv
                size[A] -= 1
                size[best] += 1
                moved += 1
            moves += moved
            if moved == 0:
                break
    return moves


cdef inline void _neumaier(double* s, double* c, double x) nogil:
    cdef double t = s[0] + x
    if abs(s[0]) >= abs(x):
        c[0] += (s[0] - t) + x
    else:
        c[0] += (x - t) + s[0]
    s[0] = t


def layout_energy_grad(pos, indptr, indices, double delta, bint with_grad=True):
    cdef const double[:, ::1] z = np.ascontiguousarray(pos, dtype=np.float64)
    cdef const i64[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const i64[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef Py_ssize_t n = z.shape[0], i, j, k
    grad_arr = np.zeros((n, 2), dtype=np.float64)
    cdef double[:, ::1] g = grad_arr
    cdef double dx, dy, r2, r, coef, d2 = delta * delta
    cdef double rs = 0.0, rc = 0.0, as_ = 0.0, ac = 0.0
    cdef bint bad = False
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                dx = z[i, 0] - z[j, 0]
                dy = z[i, 1] - z[j, 1]
                r2 = dx * dx + dy * dy
                if r2 == 0.0:
                    bad = True
                    break
                _neumaier(&rs, &rc, -d2 * log(r2))
                if with_grad:
                    coef = -2.0 * d2 / r2
                    g[i, 0] += coef * dx
                    g[i, 1] += coef * dy
                    g[j, 0] -= coef * dx
                    g[j, 1] -= coef * dy
            if bad:
                break
        if not bad:
            for i in range(n):
                for k in range(ip[i], ip[i + 1]):
                    j = ix[k]
                    dx = z[i, 0] - z[j, 0]
                    dy = z[i, 1] - z[j, 1]
                    r = sqrt(dx * dx + dy * dy)
                    _neumaier(&as_, &ac, r * r * r)
                    if with_grad:
                        coef = 2.0 * r / delta
                        g[i, 0] += coef * dx
                        g[i, 1] += coef * dy
    if bad:
        raise ValueError("coincident vertices")
    energy = (rs + rc) + (as_ + ac) / (3.0 * delta)
    return energy, (grad_arr if with_grad else None)
