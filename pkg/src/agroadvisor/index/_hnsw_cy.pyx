# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled navigable small-world graph backend.

Contract-identical to ``_hnsw_py.PyHnsw``: the owner draws levels, ids are
insertion ordinals, ``search`` returns (ids, cosine distances) ascending.
Scratch heaps are instance-owned, so a graph instance is not reentrant;
the owning index serializes calls.
"""

import numpy as np

cdef enum:
    MAX_LEVELS = 32


cdef inline bint _before(double d1, int i1, double d2, int i2) noexcept:
    return d1 < d2 or (d1 == d2 and i1 < i2)


cdef int _hpush(double[::1] hd, int[::1] hi, int n, double d, int e) noexcept:
    cdef int i = n, p
    cdef double td
    cdef int ti
    hd[n] = d
    hi[n] = e
    n += 1
    while i > 0:
        p = (i - 1) >> 1
        if _before(hd[i], hi[i], hd[p], hi[p]):
            td = hd[p]; hd[p] = hd[i]; hd[i] = td
            ti = hi[p]; hi[p] = hi[i]; hi[i] = ti
            i = p
        else:
            break
    return n


cdef int _hpop(double[::1] hd, int[::1] hi, int n) noexcept:
    cdef int i = 0, c
    cdef double td
    cdef int ti
    n -= 1
    hd[0] = hd[n]
    hi[0] = hi[n]
    while True:
        c = 2 * i + 1
        if c >= n:
            break
        if c + 1 < n and _before(hd[c + 1], hi[c + 1], hd[c], hi[c]):
            c += 1
        if _before(hd[c], hi[c], hd[i], hi[i]):
            td = hd[c]; hd[c] = hd[i]; hd[i] = td
            ti = hi[c]; hi[c] = hi[i]; hi[i] = ti
            i = c
        else:
            break
    return n


cdef class CyHnsw:
    cdef public int dims, m, m0, ef_construction, count, entry_point, max_level
    cdef public str name
    cdef object _vec_arr, _levels_arr, _visited_arr
    cdef list _nbr_arrs, _cnt_arrs
    cdef object _cd_a, _ci_a, _rd_a, _ri_a, _fd_a, _fi_a, _sd_a, _si_a, _ki_a, _en_a
    cdef object _ld_a, _li_a, _lk_a
    cdef long _epoch

    def __init__(self, int dims, int m=16, int ef_construction=200):
        self.name = "cython"
        self.dims = dims
        self.m = m
        self.m0 = 2 * m
        self.ef_construction = ef_construction
        self.count = 0
        self.entry_point = -1
        self.max_level = -1
        self._epoch = 0
        cdef int cap = 1024
        self._vec_arr = np.zeros((cap, dims), dtype=np.float32)
        self._levels_arr = np.zeros(cap, dtype=np.int32)
        self._visited_arr = np.zeros(cap, dtype=np.int64)
        self._nbr_arrs = []
        self._cnt_arrs = []
        self._alloc_scratch(cap, ef_construction)

    def _alloc_scratch(self, int cap, int ef):
        cdef int side = max(ef, self.m0) + 8
        self._cd_a = np.zeros(cap + 8, dtype=np.float64)
        self._ci_a = np.zeros(cap + 8, dtype=np.int32)
        self._rd_a = np.zeros(cap + 8, dtype=np.float64)
        self._ri_a = np.zeros(cap + 8, dtype=np.int32)
        self._fd_a = np.zeros(side, dtype=np.float64)
        self._fi_a = np.zeros(side, dtype=np.int32)
        self._sd_a = np.zeros(side, dtype=np.float64)
        self._si_a = np.zeros(side, dtype=np.int32)
        self._ki_a = np.zeros(side, dtype=np.int32)
        self._en_a = np.zeros(side, dtype=np.int32)
        # _link has its own scratch: it runs while add() is iterating _ki_a.
        self._ld_a = np.zeros(self.m0 + 8, dtype=np.float64)
        self._li_a = np.zeros(self.m0 + 8, dtype=np.int32)
        self._lk_a = np.zeros(self.m0 + 8, dtype=np.int32)

    def _grow(self, int needed):
        cdef int cap = self._vec_arr.shape[0]
        if needed <= cap:
            return
        cdef int new_cap = max(cap * 2, needed)
        self._vec_arr = np.vstack(
            [self._vec_arr, np.zeros((new_cap - cap, self.dims), np.float32)]
        )
        self._levels_arr = np.concatenate([self._levels_arr, np.zeros(new_cap - cap, np.int32)])
        self._visited_arr = np.concatenate([self._visited_arr, np.zeros(new_cap - cap, np.int64)])
        cdef int layer, width
        for layer in range(len(self._nbr_arrs)):
            width = self._nbr_arrs[layer].shape[1]
            self._nbr_arrs[layer] = np.vstack(
                [self._nbr_arrs[layer], np.zeros((new_cap - cap, width), np.int32)]
            )
            self._cnt_arrs[layer] = np.concatenate(
                [self._cnt_arrs[layer], np.zeros(new_cap - cap, np.int32)]
            )
        cdef int side = self._fd_a.shape[0]
        self._cd_a = np.zeros(new_cap + 8, dtype=np.float64)
        self._ci_a = np.zeros(new_cap + 8, dtype=np.int32)
        self._rd_a = np.zeros(new_cap + 8, dtype=np.float64)
        self._ri_a = np.zeros(new_cap + 8, dtype=np.int32)

    def _ensure_layer(self, int layer):
        cdef int cap = self._vec_arr.shape[0]
        cdef int width
        while len(self._nbr_arrs) <= layer:
            width = (self.m0 if len(self._nbr_arrs) == 0 else self.m) + 1
            self._nbr_arrs.append(np.zeros((cap, width), dtype=np.int32))
            self._cnt_arrs.append(np.zeros(cap, dtype=np.int32))

    def _ensure_ef(self, int ef):
        if max(ef, self.m0) + 8 > <int> self._fd_a.shape[0]:
            cap = self._vec_arr.shape[0]
            self._alloc_scratch(cap, ef)

    cdef inline double _dist_to(self, float[:, ::1] V, float[::1] q, int e) noexcept:
        # float accumulation vectorizes under -ffast-math; approximate
        # distances only steer the graph, returned scores are recomputed
        # in float64 by the owner.
        cdef float s = 0.0
        cdef int j
        for j in range(self.dims):
            s += V[e, j] * q[j]
        return 1.0 - <double> s

    cdef inline double _dist_rows(self, float[:, ::1] V, int a, int b) noexcept:
        cdef float s = 0.0
        cdef int j
        for j in range(self.dims):
            s += V[a, j] * V[b, j]
        return 1.0 - <double> s

    cdef int _search_layer(self, float[::1] q, int[::1] entries, int n_entry,
                           int layer, int ef, double[::1] out_d, int[::1] out_i):
        cdef float[:, ::1] V = self._vec_arr
        cdef int[:, ::1] nbrs = self._nbr_arrs[layer]
        cdef int[::1] cnts = self._cnt_arrs[layer]
        cdef long[::1] visited = self._visited_arr
        cdef double[::1] cd = self._cd_a
        cdef int[::1] ci = self._ci_a
        cdef double[::1] rd = self._rd_a
        cdef int[::1] ri = self._ri_a
        cdef int nc = 0, nr = 0
        cdef int i, e, c, total
        cdef double d, d_c, worst

        self._epoch += 1
        cdef long epoch = self._epoch
        for i in range(n_entry):
            e = entries[i]
            if visited[e] == epoch:
                continue
            visited[e] = epoch
            d = self._dist_to(V, q, e)
            nc = _hpush(cd, ci, nc, d, e)
            nr = _hpush(rd, ri, nr, -d, e)

        while nc > 0:
            d_c = cd[0]
            c = ci[0]
            nc = _hpop(cd, ci, nc)
            if nr >= ef and d_c > -rd[0]:
                break
            for i in range(cnts[c]):
                e = nbrs[c, i]
                if visited[e] == epoch:
                    continue
                visited[e] = epoch
                d = self._dist_to(V, q, e)
                if nr < ef:
                    nc = _hpush(cd, ci, nc, d, e)
                    nr = _hpush(rd, ri, nr, -d, e)
                elif d < -rd[0]:
                    nc = _hpush(cd, ci, nc, d, e)
                    nr = _hpop(rd, ri, nr)
                    nr = _hpush(rd, ri, nr, -d, e)

        total = nr
        for i in range(total - 1, -1, -1):
            out_d[i] = -rd[0]
            out_i[i] = ri[0]
            nr = _hpop(rd, ri, nr)
        return total

    cdef int _select(self, double[::1] cand_d, int[::1] cand_i, int n, int m, int[::1] out):
        """Diversity-aware neighbor selection over ascending candidates."""
        cdef float[:, ::1] V = self._vec_arr
        cdef double[::1] sd = self._sd_a
        cdef int[::1] si = self._si_a
        cdef int n_out = 0, n_disc = 0
        cdef int idx, j, e
        cdef double d, dmin, dr
        if n <= m:
            for idx in range(n):
                out[idx] = cand_i[idx]
            return n
        for idx in range(n):
            if n_out >= m:
                break
            d = cand_d[idx]
            e = cand_i[idx]
            if n_out == 0:
                out[0] = e
                n_out = 1
                continue
            dmin = 1e300
            for j in range(n_out):
                dr = self._dist_rows(V, e, out[j])
                if dr < dmin:
                    dmin = dr
            if d < dmin:
                out[n_out] = e
                n_out += 1
            else:
                sd[n_disc] = d
                si[n_disc] = e
                n_disc += 1
        for j in range(n_disc):
            if n_out >= m:
                break
            out[n_out] = si[j]
            n_out += 1
        return n_out

    cdef void _link(self, int layer, int a, int b):
        cdef int[:, ::1] nbrs = self._nbr_arrs[layer]
        cdef int[::1] cnts = self._cnt_arrs[layer]
        cdef float[:, ::1] V = self._vec_arr
        cdef double[::1] fd = self._ld_a
        cdef int[::1] fi = self._li_a
        cdef int[::1] ki = self._lk_a
        cdef int cap = self.m0 if layer == 0 else self.m
        cdef int i, j, n, nk
        cdef double d
        cdef int ti
        cdef double td
        nbrs[a, cnts[a]] = b
        cnts[a] += 1
        if cnts[a] <= cap:
            return
        # Shrink: rank current links by distance, then re-select.
        n = cnts[a]
        for i in range(n):
            fd[i] = self._dist_rows(V, a, nbrs[a, i])
            fi[i] = nbrs[a, i]
        for i in range(1, n):  # insertion sort, n <= 2m+1
            td = fd[i]
            ti = fi[i]
            j = i - 1
            while j >= 0 and _before(td, ti, fd[j], fi[j]):
                fd[j + 1] = fd[j]
                fi[j + 1] = fi[j]
                j -= 1
            fd[j + 1] = td
            fi[j + 1] = ti
        nk = self._select(fd, fi, n, cap, ki)
        for i in range(nk):
            nbrs[a, i] = ki[i]
        cnts[a] = nk

    def add(self, vector, int level):
        v32 = np.ascontiguousarray(vector, dtype=np.float32)
        if v32.shape[0] != self.dims:
            raise ValueError(f"vector dims {v32.shape[0]} != {self.dims}")
        if level >= MAX_LEVELS:
            level = MAX_LEVELS - 1
        cdef int node = self.count
        self._grow(node + 1)
        self._ensure_layer(level)
        self._vec_arr[node, :] = v32
        self._levels_arr[node] = level
        self.count += 1
        if self.entry_point < 0:
            self.entry_point = node
            self.max_level = level
            return node

        cdef float[::1] q = v32
        cdef int[::1] en = self._en_a
        cdef double[::1] fd = self._fd_a
        cdef int[::1] fi = self._fi_a
        cdef int[::1] ki = self._ki_a
        cdef int ep = self.entry_point
        cdef int layer, nf, nk, j, mm
        for layer in range(self.max_level, level, -1):
            en[0] = ep
            self._search_layer(q, en, 1, layer, 1, fd, fi)
            ep = fi[0]
        cdef int n_entry = 1
        en[0] = ep
        cdef int top = level if level < self.max_level else self.max_level
        for layer in range(top, -1, -1):
            nf = self._search_layer(q, en, n_entry, layer, self.ef_construction, fd, fi)
            mm = self.m0 if layer == 0 else self.m
            nk = self._select(fd, fi, nf, mm, ki)
            for j in range(nk):
                self._link(layer, node, ki[j])
                self._link(layer, ki[j], node)
            for j in range(nf):
                en[j] = fi[j]
            n_entry = nf
        if level > self.max_level:
            self.entry_point = node
            self.max_level = level
        return node

    def search(self, query, int k, int ef):
        if self.count == 0:
            return np.empty(0, np.int64), np.empty(0, np.float64)
        cdef int want = ef if ef > k else k
        self._ensure_ef(want)
        q32 = np.ascontiguousarray(query, dtype=np.float32)
        cdef float[::1] q = q32
        cdef int[::1] en = self._en_a
        cdef double[::1] fd = self._fd_a
        cdef int[::1] fi = self._fi_a
        cdef int ep = self.entry_point
        cdef int layer, nf
        for layer in range(self.max_level, 0, -1):
            en[0] = ep
            self._search_layer(q, en, 1, layer, 1, fd, fi)
            ep = fi[0]
        en[0] = ep
        nf = self._search_layer(q, en, 1, 0, want, fd, fi)
        if k < nf:
            nf = k
        ids = np.asarray(fi[:nf]).astype(np.int64)
        dists = np.asarray(fd[:nf]).astype(np.float64)
        return ids, dists
