# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Semantics mirror ``_pykernels`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()

ctypedef unsigned long long u64
ctypedef long long i64


cdef inline u64 _next(u64* state) noexcept nogil:
    state[0] += <u64>0x9E3779B97F4A7C15ULL
    cdef u64 z = state[0]
    z = (z ^ (z >> 30)) * <u64>0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * <u64>0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline i64 _below(u64* state, i64 bound) noexcept nogil:
    return <i64>(_next(state) % <u64>bound)


cdef struct LazyPerm:
    i64* val
    i64* stamp
    i64 scan
    i64 m
    i64 r


cdef inline void _perm_reset(LazyPerm* lp, i64 m) noexcept nogil:
    lp.scan += 1
    lp.m = m
    lp.r = 0


cdef inline i64 _perm_get(LazyPerm* lp, i64 i) noexcept nogil:
    if lp.stamp[i] == lp.scan:
        return lp.val[i]
    return i


cdef inline i64 _perm_next(LazyPerm* lp, u64* state) noexcept nogil:
    cdef i64 r = lp.r
    cdef i64 j = r + _below(state, lp.m - r)
    cdef i64 x = _perm_get(lp, j)
    lp.val[j] = _perm_get(lp, r)
    lp.stamp[j] = lp.scan
    lp.r = r + 1
    return x


cdef i64 _remove_cycles(i64* walk, i64 wlen, i64* out, i64* pos) noexcept nogil:
    # pos must be all -1 on entry; restored to -1 on exit
    cdef i64 olen = 0, i, v, cut, k
    for i in range(wlen):
        v = walk[i]
        if pos[v] >= 0:
            cut = pos[v] + 1
            for k in range(cut, olen):
                pos[out[k]] = -1
            olen = cut
        else:
            pos[v] = olen
            out[olen] = v
            olen += 1
    for k in range(olen):
        pos[out[k]] = -1
    return olen


cdef inline bint _is_edge(i64[::1] ip, i64[::1] ix, i64 a, i64 b) noexcept nogil:
    cdef i64 e
    for e in range(ip[a], ip[a + 1]):
        if ix[e] == b:
            return True
    return False


def sp_search(indptr, indices, dist_t, wp, s, t, u64 seed, init=None, double rtol=1e-12, bint trace=False, nxt=None):
    cdef i64[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef i64[::1] ix = np.ascontiguousarray(indices, dtype=np.int64)
    cdef double[::1] dt = np.ascontiguousarray(dist_t, dtype=np.float64)
    cdef double[:, ::1] w = np.ascontiguousarray(wp, dtype=np.float64)
    cdef i64 n = dt.shape[0]
    cdef i64 src = s, dst = t
    cdef u64 state = seed
    cdef i64 maxm = 2 * n * (n + 1) + 4
    val_arr = np.empty(maxm, dtype=np.int64)
    stamp_arr = np.zeros(maxm, dtype=np.int64)
    cdef i64[::1] val = val_arr
    cdef i64[::1] stamp = stamp_arr
    cdef LazyPerm lp
    lp.val = &val[0]
    lp.stamp = &stamp[0]
    lp.scan = 0
    path_arr = np.empty(n + 2, dtype=np.int64)
    walk_arr = np.empty(n + 2 + (0 if init is None else len(init)), dtype=np.int64)
    pos_arr = np.full(n, -1, dtype=np.int64)
    cdef i64[::1] p = path_arr
    cdef i64[::1] q = walk_arr
    cdef i64[::1] pos = pos_arr
    cdef i64 plen, v, cnt, r, e, u, x, k, l, a, b, c, n1, n2, m, i, off
    cdef double dv, cur, delta
    cdef bint moved, repair = nxt is not None
    cdef i64[:, ::1] hop
    cdef i64[::1] ex
    if repair:
        hop = np.ascontiguousarray(nxt, dtype=np.int64)
        ex = np.empty(n * n + 1, dtype=np.int64)
    lengths = []

    if init is None:
        plen = 1
        p[0] = src
        v = src
        while v != dst:
            dv = dt[v]
            cnt = 0
            for e in range(ip[v], ip[v + 1]):
                if dt[ix[e]] < dv:
                    cnt += 1
            if cnt == 0:
                raise ValueError(f"vertex {v} has no neighbour closer to {dst}")
            r = _below(&state, cnt)
            for e in range(ip[v], ip[v + 1]):
                if dt[ix[e]] < dv:
                    if r == 0:
                        v = ix[e]
                        break
                    r -= 1
            p[plen] = v
            plen += 1
    else:
        init_arr = np.ascontiguousarray(init, dtype=np.int64)
        for i in range(init_arr.shape[0]):
            q[i] = init_arr[i]
        plen = _remove_cycles(&q[0], init_arr.shape[0], &p[0], &pos[0])

    cur = 0.0
    for i in range(plen - 1):
        cur += w[p[i], p[i + 1]]
    if trace:
        lengths.append(cur)

    while True:
        k = plen - 1
        n1 = k - 1
        n2 = n1 + (k - 1) * n
        m = n2 + k * n
        _perm_reset(&lp, m)
        moved = False
        for i in range(m):
            x = _perm_next(&lp, &state)
            if x < n1:
                l = x + 1
                a = p[l - 1]; b = p[l]; c = p[l + 1]
                delta = w[a, c] - w[a, b] - w[b, c]
                u = -1
            elif x < n2:
                off = x - n1
                l = off // n + 1
                u = off % n
                a = p[l - 1]; b = p[l]; c = p[l + 1]
                if u == a or u == b or u == c:
                    continue
                delta = w[u, a] + w[u, c] - w[a, b] - w[b, c]
            else:
                off = x - n2
                l = off // n + 1
                u = off % n
                a = p[l - 1]; c = p[l]
                if u == a or u == c:
                    continue
                delta = w[u, a] + w[u, c] - w[a, c]
            if delta < -rtol * cur:
                # build the walk q, then strip cycles back into p
                if x < n1:
                    for e in range(l):
                        q[e] = p[e]
                    for e in range(l + 1, plen):
                        q[e - 1] = p[e]
                    r = plen - 1
                elif x < n2:
                    for e in range(plen):
                        q[e] = p[e]
                    q[l] = u
                    r = plen
                else:
                    for e in range(l):
                        q[e] = p[e]
                    q[l] = u
                    for e in range(l, plen):
                        q[e + 1] = p[e]
                    r = plen + 1
                plen = _remove_cycles(&q[0], r, &p[0], &pos[0])
                cur = 0.0
                for e in range(plen - 1):
                    cur += w[p[e], p[e + 1]]
                if trace:
                    lengths.append(cur)
                moved = True
                break
        if not moved and repair:
            # expand non-edge hops along stored shortest paths
            r = 1
            ex[0] = p[0]
            for e in range(plen - 1):
                a = p[e]; b = p[e + 1]
                if _is_edge(ip, ix, a, b):
                    ex[r] = b
                    r += 1
                else:
                    moved = True
                    v = a
                    while v != b:
                        v = hop[v, b]
                        ex[r] = v
                        r += 1
            if moved:
                plen = _remove_cycles(&ex[0], r, &p[0], &pos[0])
                cur = 0.0
                for e in range(plen - 1):
                    cur += w[p[e], p[e + 1]]
                if trace:
                    lengths.append(cur)
        if not moved:
            break

    out = path_arr[:plen].copy()
    if trace:
        return out, lengths
    return out


def tsp_search(d, u64 seed, init=None, double rtol=1e-12, bint trace=False):
    cdef double[:, ::1] dm = np.ascontiguousarray(d, dtype=np.float64)
    cdef i64 n = dm.shape[0]
    cdef u64 state = seed
    cdef i64 r, j, tmp, i, x, a, b, c, e, lo, hi
    cdef double cur, delta
    cdef bint moved
    tour_arr = np.arange(n, dtype=np.int64)
    cdef i64[::1] tour = tour_arr
    if init is None:
        for r in range(n - 1, 0, -1):
            j = _below(&state, r + 1)
            tmp = tour[r]; tour[r] = tour[j]; tour[j] = tmp
    else:
        init_arr = np.ascontiguousarray(init, dtype=np.int64)
        for r in range(n):
            tour[r] = init_arr[r]

    cdef i64 m = 0
    for i in range(n - 2):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            m += 1
    mi_arr = np.empty(max(m, 1), dtype=np.int64)
    mj_arr = np.empty(max(m, 1), dtype=np.int64)
    cdef i64[::1] mi = mi_arr
    cdef i64[::1] mj = mj_arr
    x = 0
    for i in range(n - 2):
        for j in range(i + 2, n):
            if i == 0 and j == n - 1:
                continue
            mi[x] = i; mj[x] = j
            x += 1

    val_arr = np.empty(max(m, 1), dtype=np.int64)
    stamp_arr = np.zeros(max(m, 1), dtype=np.int64)
    cdef i64[::1] val = val_arr
    cdef i64[::1] stamp = stamp_arr
    cdef LazyPerm lp
    lp.val = &val[0]
    lp.stamp = &stamp[0]
    lp.scan = 0

    lengths = []
    cur = 0.0
    for r in range(n):
        cur += dm[tour[r], tour[(r + 1) % n]]
    if trace:
        lengths.append(cur)

    while True:
        _perm_reset(&lp, m)
        moved = False
        for r in range(m):
            x = _perm_next(&lp, &state)
            i = mi[x]; j = mj[x]
            a = tour[i]; b = tour[i + 1]; c = tour[j]; e = tour[(j + 1) % n]
            delta = dm[a, c] + dm[b, e] - dm[a, b] - dm[c, e]
            if delta < -rtol * cur:
                lo = i + 1; hi = j
                while lo < hi:
                    tmp = tour[lo]; tour[lo] = tour[hi]; tour[hi] = tmp
                    lo += 1; hi -= 1
                cur = 0.0
                for r in range(n):
                    cur += dm[tour[r], tour[(r + 1) % n]]
                if trace:
                    lengths.append(cur)
                moved = True
                break
        if not moved:
            break
    if trace:
        return tour_arr, lengths
    return tour_arr


def spp_search(set_ptr, set_cells, cost, n_cells, u64 seed, init=None, bint trace=False):
    cdef i64[::1] sp = np.ascontiguousarray(set_ptr, dtype=np.int64)
    cdef i64[::1] sc = np.ascontiguousarray(set_cells, dtype=np.int64)
    cdef i64[::1] cs = np.ascontiguousarray(cost, dtype=np.int64)
    cdef i64 m = cs.shape[0]
    cdef u64 state = seed
    owner_arr = np.full(int(n_cells), -1, dtype=np.int64)
    chosen_arr = np.zeros(m, dtype=np.uint8)
    order_arr = np.empty(m + 1, dtype=np.int64)
    cdef i64[::1] owner = owner_arr
    cdef unsigned char[::1] chosen = chosen_arr
    cdef i64[::1] order = order_arr
    cdef i64 ns = 0, weight = 0, total, x, r, i, j, e, off, o, pos
    cdef bint moved, ok
    weights = []

    if init is not None:
        for j in sorted(int(v) for v in init):
            for e in range(sp[j], sp[j + 1]):
                if owner[sc[e]] != -1:
                    raise ValueError("initial selection is not a packing")
                owner[sc[e]] = j
            chosen[j] = 1
            order[ns] = j
            ns += 1
            weight += cs[j]
    if trace:
        weights.append(weight)

    maxm = m + m * m + 1
    val_arr = np.empty(maxm, dtype=np.int64)
    stamp_arr = np.zeros(maxm, dtype=np.int64)
    cdef i64[::1] val = val_arr
    cdef i64[::1] stamp = stamp_arr
    cdef LazyPerm lp
    lp.val = &val[0]
    lp.stamp = &stamp[0]
    lp.scan = 0

    while True:
        total = m + ns * m
        _perm_reset(&lp, total)
        moved = False
        for r in range(total):
            x = _perm_next(&lp, &state)
            if x < m:
                j = x
                i = -1
                if chosen[j] or cs[j] <= 0:
                    continue
                ok = True
                for e in range(sp[j], sp[j + 1]):
                    if owner[sc[e]] != -1:
                        ok = False
                        break
                if not ok:
                    continue
            else:
                off = x - m
                i = order[off // m]
                j = off % m
                if chosen[j] or cs[j] <= cs[i]:
                    continue
                ok = True
                for e in range(sp[j], sp[j + 1]):
                    o = owner[sc[e]]
                    if o != -1 and o != i:
                        ok = False
                        break
                if not ok:
                    continue
            if i >= 0:
                for e in range(sp[i], sp[i + 1]):
                    owner[sc[e]] = -1
                chosen[i] = 0
                pos = 0
                for e in range(ns):
                    if order[e] != i:
                        order[pos] = order[e]
                        pos += 1
                ns -= 1
                weight -= cs[i]
            for e in range(sp[j], sp[j + 1]):
                owner[sc[e]] = j
            chosen[j] = 1
            # sorted insert
            pos = ns
            while pos > 0 and order[pos - 1] > j:
                order[pos] = order[pos - 1]
                pos -= 1
            order[pos] = j
            ns += 1
            weight += cs[j]
            if trace:
                weights.append(weight)
            moved = True
            break
        if not moved:
            break
    out = order_arr[:ns].copy()
    if trace:
        return out, weights
    return out


def jaccard_matrix(ptr, elems):
    cdef i64[::1] pt = np.ascontiguousarray(ptr, dtype=np.int64)
    cdef i64[::1] el = np.ascontiguousarray(elems, dtype=np.int64)
    cdef i64 n = pt.shape[0] - 1
    out_arr = np.zeros((n, n), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef i64 i, j, a, ae, b, be, inter, uni
    cdef double dval
    with nogil:
        for i in range(n):
            for j in range(i + 1, n):
                a = pt[i]; ae = pt[i + 1]; b = pt[j]; be = pt[j + 1]
                inter = 0
                while a < ae and b < be:
                    if el[a] == el[b]:
                        inter += 1; a += 1; b += 1
                    elif el[a] < el[b]:
                        a += 1
                    else:
                        b += 1
                uni = (pt[i + 1] - pt[i]) + (pt[j + 1] - pt[j]) - inter
                if uni > 0:
                    dval = 1.0 - (<double>inter) / (<double>uni)
                else:
                    dval = 0.0
                out[i, j] = dval
                out[j, i] = dval
    return out_arr


def floyd_warshall(w):
    d_arr = np.array(w, dtype=np.float64, order="C")
    cdef double[:, ::1] d = d_arr
    cdef i64 n = d.shape[0]
    nxt_arr = np.full((n, n), -1, dtype=np.int64)
    cdef i64[:, ::1] nxt = nxt_arr
    cdef i64 i, j, k
    cdef double dik, cand
    for i in range(n):
        for j in range(n):
            if d[i, j] < INFINITY:
                nxt[i, j] = j
    with nogil:
        for k in range(n):
            for i in range(n):
                dik = d[i, k]
                if dik == INFINITY:
                    continue
                for j in range(n):
                    cand = dik + d[k, j]
                    if cand < d[i, j]:
                        d[i, j] = cand
                        nxt[i, j] = nxt[i, k]
    return d_arr, nxt_arr
