"""Navigable small-world graph over unit vectors (inner-product metric).

Hierarchical variant: a jitted flat-array base layer holds every vector;
sparse upper layers (python dicts, a few percent of nodes) provide long
hops so the greedy descent starts near the target.  Build and search are
deterministic for a fixed (vectors, params) pair: node levels come from a
seeded RNG and every heap comparison breaks ties on node id.

The base-layer kernels are compiled with numba; the first call in a fresh
environment pays a one-time JIT cost that the on-disk cache absorbs
afterwards.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit


@dataclass(frozen=True)
class NswParams:
    """Graph shape and search effort.

    ``m`` is the per-node degree budget on upper layers (the base layer
    allows 2m); ``ef_construction`` and ``ef_search`` are the beam widths
    used while building and querying.
    """

    m: int = 16
    ef_construction: int = 200
    ef_search: int = 128
    seed: int = 1234


# --- jitted heap primitives ----------------------------------------------
# Both heaps share one sift implementation: the root holds the smallest
# (sim, id) pair. Pushing negated sims turns it into a max-heap.

@njit(cache=True)
def _heap_push(sims, ids, n, s, i):
    sims[n] = s
    ids[n] = i
    n += 1
    c = n - 1
    while c > 0:
        p = (c - 1) >> 1
        if sims[c] < sims[p] or (sims[c] == sims[p] and ids[c] < ids[p]):
            sims[c], sims[p] = sims[p], sims[c]
            ids[c], ids[p] = ids[p], ids[c]
            c = p
        else:
            break
    return n


@njit(cache=True)
def _heap_pop(sims, ids, n):
    n -= 1
    sims[0] = sims[n]
    ids[0] = ids[n]
    c = 0
    while True:
        left = 2 * c + 1
        right = left + 1
        small = c
        if left < n and (sims[left] < sims[small]
                         or (sims[left] == sims[small] and ids[left] < ids[small])):
            small = left
        if right < n and (sims[right] < sims[small]
                          or (sims[right] == sims[small] and ids[right] < ids[small])):
            small = right
        if small == c:
            break
        sims[c], sims[small] = sims[small], sims[c]
        ids[c], ids[small] = ids[small], ids[c]
        c = small
    return n


@njit(cache=True)
def _search_base(q, ep, ef, adj, deg, vecs, visited, gen, out_ids, out_sims):
    """Beam search on the base layer from entry point ``ep``.

    Keeps a max-heap of frontier candidates and a min-heap of the best
    ``ef`` results; stops when the closest unexpanded candidate cannot
    beat the worst kept result. Writes results best-first into out_ids /
    out_sims and returns how many there are.
    """
    n, d = vecs.shape
    cand_s = np.empty(n + 1, dtype=np.float32)
    cand_i = np.empty(n + 1, dtype=np.int32)
    ncand = 0
    res_s = np.empty(ef + 1, dtype=np.float32)
    res_i = np.empty(ef + 1, dtype=np.int32)
    nres = 0

    visited[ep] = gen
    s = np.float32(0.0)
    for t in range(d):
        s += vecs[ep, t] * q[t]
    ncand = _heap_push(cand_s, cand_i, ncand, -s, ep)
    nres = _heap_push(res_s, res_i, nres, s, ep)

    while ncand > 0:
        best_s = -cand_s[0]
        best_id = cand_i[0]
        ncand = _heap_pop(cand_s, cand_i, ncand)
        if nres >= ef and best_s < res_s[0]:
            break
        for jj in range(deg[best_id]):
            nb = adj[best_id, jj]
            if visited[nb] == gen:
                continue
            visited[nb] = gen
            s = np.float32(0.0)
            for t in range(d):
                s += vecs[nb, t] * q[t]
            if nres < ef or s > res_s[0]:
                ncand = _heap_push(cand_s, cand_i, ncand, -s, nb)
                nres = _heap_push(res_s, res_i, nres, s, nb)
                if nres > ef:
                    nres = _heap_pop(res_s, res_i, nres)

    order = np.argsort(-res_s[:nres], kind="mergesort")
    for i in range(nres):
        out_ids[i] = res_i[order[i]]
        out_sims[i] = res_s[order[i]]
    return nres


@njit(cache=True)
def _select_neighbors(cand_ids, cand_sims, cnt, m, vecs, out):
    """Diversity pruning: keep a candidate only if it is closer to the
    query than to every neighbor already kept, then fill any remaining
    slots from the pruned pile. Candidates must arrive best-first."""
    d = vecs.shape[1]
    nout = 0
    pruned = np.empty(cnt, dtype=np.int32)
    npruned = 0
    for i in range(cnt):
        if nout >= m:
            break
        c = cand_ids[i]
        keep = True
        for j in range(nout):
            s = np.float32(0.0)
            for t in range(d):
                s += vecs[c, t] * vecs[out[j], t]
            if s > cand_sims[i]:
                keep = False
                break
        if keep:
            out[nout] = c
            nout += 1
        else:
            pruned[npruned] = c
            npruned += 1
    i = 0
    while nout < m and i < npruned:
        out[nout] = pruned[i]
        nout += 1
        i += 1
    return nout


@njit(cache=True)
def _insert_base(i, q, ep, efc, m, m0, adj, deg, vecs, visited, gen):
    """Insert node ``i`` into the base layer: search for its neighborhood,
    connect to up to ``m`` pruned neighbors, backlink, and re-prune any
    neighbor that overflows its ``m0`` budget. Returns the best neighbor
    found, which the caller uses as the next entry point."""
    found_ids = np.empty(efc + 1, dtype=np.int32)
    found_sims = np.empty(efc + 1, dtype=np.float32)
    cnt = _search_base(q, ep, efc, adj, deg, vecs, visited, gen,
                       found_ids, found_sims)
    sel = np.empty(m, dtype=np.int32)
    nsel = _select_neighbors(found_ids, found_sims, cnt, m, vecs, sel)
    for j in range(nsel):
        adj[i, j] = sel[j]
    deg[i] = nsel
    d = vecs.shape[1]
    for j in range(nsel):
        nb = sel[j]
        if deg[nb] < m0:
            adj[nb, deg[nb]] = i
            deg[nb] += 1
        else:
            tmp_i = np.empty(m0 + 1, dtype=np.int32)
            tmp_s = np.empty(m0 + 1, dtype=np.float32)
            for u in range(m0):
                tmp_i[u] = adj[nb, u]
            tmp_i[m0] = i
            for u in range(m0 + 1):
                s = np.float32(0.0)
                for t in range(d):
                    s += vecs[tmp_i[u], t] * vecs[nb, t]
                tmp_s[u] = s
            order = np.argsort(-tmp_s, kind="mergesort")
            sorted_i = tmp_i[order]
            sorted_s = tmp_s[order]
            keep = np.empty(m0, dtype=np.int32)
            nkeep = _select_neighbors(sorted_i, sorted_s, m0 + 1, m0, vecs, keep)
            for u in range(nkeep):
                adj[nb, u] = keep[u]
            deg[nb] = nkeep
    if nsel > 0:
        return sel[0]
    return i


class NswGraph:
    """Built search graph. Immutable once constructed; `search` allocates
    its own scratch space, so concurrent queries are safe."""

    def __init__(self, vecs: np.ndarray, params: NswParams):
        self.params = params
        self.vecs = np.ascontiguousarray(vecs, dtype=np.float32)
        n = self.vecs.shape[0]
        m = params.m
        self.m0 = 2 * m
        self.adj = np.full((n, self.m0), -1, dtype=np.int32)
        self.deg = np.zeros(n, dtype=np.int32)
        # upper[level][node] -> neighbor list; only nodes whose sampled
        # level reaches that height appear.
        self.upper: dict[int, dict[int, list[int]]] = {}
        self.entry = 0
        self.top = 0
        self._build()

    def _greedy_upper(self, q: np.ndarray, ep: int, from_level: int,
                      to_level: int) -> int:
        """Greedy descent through upper layers (levels from_level down to
        to_level + 1), hill-climbing to the most similar node on each."""
        vecs = self.vecs
        for level in range(from_level, to_level, -1):
            layer = self.upper.get(level)
            if not layer:
                continue
            cur = float(vecs[ep] @ q)
            changed = True
            while changed:
                changed = False
                for nb in layer.get(ep, ()):
                    s = float(vecs[nb] @ q)
                    if s > cur:
                        cur, ep, changed = s, nb, True
        return ep

    def _build(self) -> None:
        vecs = self.vecs
        n = vecs.shape[0]
        if n == 0:
            return
        params = self.params
        m = params.m
        rng = np.random.default_rng(params.seed)
        # Standard level sampling: ~1/m of the nodes reach each next layer.
        ml = 1.0 / np.log(m)
        levels = np.floor(-np.log(1.0 - rng.random(n)) * ml).astype(np.int64)
        visited = np.zeros(n, dtype=np.int64)
        self.entry = 0
        self.top = int(levels[0])
        gen = 0
        for i in range(1, n):
            q = vecs[i]
            lev = int(levels[i])
            ep = self._greedy_upper(q, self.entry, self.top, lev)
            for level in range(min(self.top, lev), 0, -1):
                layer = self.upper.setdefault(level, {})
                ep = self._insert_upper(layer, i, q, ep, m)
            gen += 1
            _insert_base(i, q, np.int32(ep), params.ef_construction, m,
                         self.m0, self.adj, self.deg, vecs, visited, gen)
            if lev > self.top:
                self.top = lev
                self.entry = i
        # First direct call into the jitted search kernel pays a one-time
        # dispatch/cache-load cost; spend it here so queries start fast.
        self.search(vecs[0], 1)

    def _insert_upper(self, layer: dict[int, list[int]], i: int,
                      q: np.ndarray, ep: int, m: int) -> int:
        """Insert into one (small) upper layer: flood out from the entry
        point to gather candidates, connect to the top ``m``, and trim any
        neighbor that overflows."""
        vecs = self.vecs
        seen = {ep}
        frontier = [ep]
        while frontier:
            nxt = []
            for c in frontier:
                for nb in layer.get(c, ()):
                    if nb not in seen:
                        seen.add(nb)
                        nxt.append(nb)
            frontier = nxt
            if len(seen) >= self.params.ef_construction:
                break
        cands = np.fromiter(seen, dtype=np.int64, count=len(seen))
        cands.sort()
        sims = vecs[cands] @ q
        order = np.argsort(-sims, kind="stable")
        sel = [int(cands[o]) for o in order[:m]]
        layer[i] = list(sel)
        for nb in sel:
            links = layer.setdefault(nb, [])
            links.append(i)
            if len(links) > m:
                arr = np.array(links, dtype=np.int64)
                ss = vecs[arr] @ vecs[nb]
                oo = np.argsort(-ss, kind="stable")
                layer[nb] = [int(arr[o]) for o in oo[:m]]
        return sel[0] if sel else ep

    def search(self, q: np.ndarray, ef: int) -> tuple[np.ndarray, np.ndarray]:
        """Best-first node ids and similarities for query vector ``q``
        with beam width ``ef``. Thread-safe: no shared scratch state."""
        n = self.vecs.shape[0]
        if n == 0:
            return (np.empty(0, dtype=np.int32), np.empty(0, dtype=np.float32))
        q32 = np.ascontiguousarray(q, dtype=np.float32)
        ep = self._greedy_upper(q32, self.entry, self.top, 0)
        ef = max(1, min(ef, n))
        visited = np.zeros(n, dtype=np.int64)
        out_ids = np.empty(ef + 1, dtype=np.int32)
        out_sims = np.empty(ef + 1, dtype=np.float32)
        cnt = _search_base(q32, np.int32(ep), ef, self.adj, self.deg,
                           self.vecs, visited, np.int64(1), out_ids, out_sims)
        return out_ids[:cnt].copy(), out_sims[:cnt].copy()
