"""Pure-Python navigable small-world graph backend.

Same contract as the compiled kernel in ``_hnsw_cy``: callers supply the
level for every inserted vector (the level sequence is drawn by the owner
so both backends build from identical draws), ids are dense insertion
ordinals, and ``search`` returns (ids, cosine distances) ascending.
Distance batches go through numpy; the traversal itself is Python, which
is why the compiled twin exists.
"""

from __future__ import annotations

import heapq

import numpy as np

MAX_LEVELS = 32


class PyHnsw:
    name = "python"

    def __init__(self, dims: int, m: int = 16, ef_construction: int = 200):
        self.dims = dims
        self.m = m
        self.m0 = 2 * m
        self.ef_construction = ef_construction
        self.count = 0
        self.entry_point = -1
        self.max_level = -1
        cap = 1024
        self._vectors = np.zeros((cap, dims), dtype=np.float32)
        self._levels = np.zeros(cap, dtype=np.int32)
        # Per layer: fixed-capacity adjacency rows plus a fill count.
        self._nbrs: list[np.ndarray] = []
        self._cnts: list[np.ndarray] = []
        self._visited = np.zeros(cap, dtype=np.int64)
        self._epoch = 0

    # -- storage ------------------------------------------------------------

    def _grow(self, needed: int) -> None:
        cap = self._vectors.shape[0]
        if needed <= cap:
            return
        new_cap = max(cap * 2, needed)
        self._vectors = np.vstack([self._vectors, np.zeros((new_cap - cap, self.dims), np.float32)])
        self._levels = np.concatenate([self._levels, np.zeros(new_cap - cap, np.int32)])
        self._visited = np.concatenate([self._visited, np.zeros(new_cap - cap, np.int64)])
        for layer in range(len(self._nbrs)):
            width = self._nbrs[layer].shape[1]
            self._nbrs[layer] = np.vstack(
                [self._nbrs[layer], np.zeros((new_cap - cap, width), np.int32)]
            )
            self._cnts[layer] = np.concatenate([self._cnts[layer], np.zeros(new_cap - cap, np.int32)])

    def _ensure_layer(self, layer: int) -> None:
        cap = self._vectors.shape[0]
        while len(self._nbrs) <= layer:
            width = (self.m0 if len(self._nbrs) == 0 else self.m) + 1
            self._nbrs.append(np.zeros((cap, width), dtype=np.int32))
            self._cnts.append(np.zeros(cap, dtype=np.int32))

    # -- distance -----------------------------------------------------------

    def _dist_many(self, q: np.ndarray, ids: np.ndarray) -> np.ndarray:
        # float32 like the compiled twin: distances steer the graph only,
        # the owner rescores returned ids in float64.
        return 1.0 - (self._vectors[ids] @ q).astype(np.float64)

    # -- search -------------------------------------------------------------

    def _search_layer(self, q: np.ndarray, entries: list[int], layer: int, ef: int) -> list[tuple[float, int]]:
        self._epoch += 1
        epoch = self._epoch
        self._visited[entries] = epoch
        dists = self._dist_many(q, np.asarray(entries, dtype=np.int64))
        candidates: list[tuple[float, int]] = []
        results: list[tuple[float, int]] = []  # max-heap via negated distance
        for d, e in zip(dists, entries):
            heapq.heappush(candidates, (float(d), e))
            heapq.heappush(results, (-float(d), e))
        nbrs, cnts = self._nbrs[layer], self._cnts[layer]
        while candidates:
            d_c, c = heapq.heappop(candidates)
            if len(results) >= ef and d_c > -results[0][0]:
                break
            row = nbrs[c, : cnts[c]]
            fresh = row[self._visited[row] != epoch]
            if fresh.size == 0:
                continue
            self._visited[fresh] = epoch
            for d, e in zip(self._dist_many(q, fresh), fresh):
                d = float(d)
                if len(results) < ef:
                    heapq.heappush(candidates, (d, int(e)))
                    heapq.heappush(results, (-d, int(e)))
                elif d < -results[0][0]:
                    heapq.heappush(candidates, (d, int(e)))
                    heapq.heapreplace(results, (-d, int(e)))
        out = [(-nd, e) for nd, e in results]
        out.sort()
        return out

    def _select_heuristic(self, candidates: list[tuple[float, int]], m: int) -> list[int]:
        """Diversity-aware selection: keep a candidate only when it is
        closer to the query point than to everything already kept."""
        if len(candidates) <= m:
            return [e for _, e in candidates]
        chosen: list[int] = []
        discarded: list[tuple[float, int]] = []
        for d, e in candidates:
            if len(chosen) >= m:
                break
            if not chosen:
                chosen.append(e)
                continue
            d_sel = self._dist_many(self._vectors[e], np.asarray(chosen))
            if d < d_sel.min():
                chosen.append(e)
            else:
                discarded.append((d, e))
        for d, e in discarded:
            if len(chosen) >= m:
                break
            chosen.append(e)
        return chosen

    def _link(self, layer: int, a: int, b: int) -> None:
        nbrs, cnts = self._nbrs[layer], self._cnts[layer]
        cap = self.m0 if layer == 0 else self.m
        nbrs[a, cnts[a]] = b
        cnts[a] += 1
        if cnts[a] > cap:
            row = nbrs[a, : cnts[a]].copy()
            dists = self._dist_many(self._vectors[a], row)
            ranked = sorted(zip(dists.tolist(), row.tolist()))
            keep = self._select_heuristic(ranked, cap)
            nbrs[a, : len(keep)] = keep
            cnts[a] = len(keep)

    # -- public contract ------------------------------------------------------

    def add(self, vector: np.ndarray, level: int) -> int:
        level = min(level, MAX_LEVELS - 1)
        node = self.count
        self._grow(node + 1)
        self._ensure_layer(level)
        self._vectors[node] = vector
        self._levels[node] = level
        self.count += 1
        if self.entry_point < 0:
            self.entry_point = node
            self.max_level = level
            return node

        q = np.asarray(vector, dtype=np.float32)
        ep = self.entry_point
        for layer in range(self.max_level, level, -1):
            ep = self._search_layer(q, [ep], layer, 1)[0][1]
        entries = [ep]
        for layer in range(min(level, self.max_level), -1, -1):
            found = self._search_layer(q, entries, layer, self.ef_construction)
            m = self.m0 if layer == 0 else self.m
            for nb in self._select_heuristic(found, m):
                self._link(layer, node, nb)
                self._link(layer, nb, node)
            entries = [e for _, e in found]
        if level > self.max_level:
            self.entry_point = node
            self.max_level = level
        return node

    def search(self, query: np.ndarray, k: int, ef: int) -> tuple[np.ndarray, np.ndarray]:
        if self.count == 0:
            return np.empty(0, np.int64), np.empty(0, np.float64)
        q = np.asarray(query, dtype=np.float32)
        ep = self.entry_point
        for layer in range(self.max_level, 0, -1):
            ep = self._search_layer(q, [ep], layer, 1)[0][1]
        found = self._search_layer(q, [ep], 0, max(ef, k))[:k]
        ids = np.asarray([e for _, e in found], dtype=np.int64)
        dists = np.asarray([d for d, _ in found], dtype=np.float64)
        return ids, dists
