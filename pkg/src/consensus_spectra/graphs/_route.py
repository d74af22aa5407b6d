"""Geodesic routing kernels for congestion reduction.

Paths live in a dense array ``paths[pair, 0..len]`` padded with -1, where
pair index is ``s * n + t``. Arc ids index ``DirectedGraph.arcs``.
"""

from __future__ import annotations

import numpy as np
from numba import njit


def in_csr(n: int, arcs) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Incoming arcs per node: (ptr, source node, arc id)."""
    m = len(arcs)
    heads = np.array([v for _, v in arcs], dtype=np.int64) if m else np.zeros(0, np.int64)
    order = np.argsort(heads, kind="stable")
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(ptr, heads + 1, 1)
    ptr = np.cumsum(ptr)
    src = np.array([arcs[k][0] for k in order], dtype=np.int64)
    return ptr, src, order.astype(np.int64)


@njit(cache=True)
def _path_arcs(path, plen, arc_of, n):
    out = np.empty(plen, dtype=np.int64)
    for k in range(plen):
        out[k] = arc_of[path[k] * n + path[k + 1]]
    return out


@njit(cache=True)
def _best(s, t, dist, by_dist, ptr, src, aid, load, own, mode, val_max, val_sum,
          pred_arc, pred_node, top=0, forbid=-1):
    """Best geodesic s->t against ``load`` minus the arcs flagged in ``own``.

    mode 0 minimizes (sum of loads, max load); mode 1 minimizes (max, sum).
    mode 2 counts arcs that would reach ``top`` (first key) and refuses arcs
    that would exceed it or equal ``forbid``.
    Returns the objective pair; predecessors are written for path recovery.
    """
    n = dist.shape[0]
    h = dist[s, t]
    big = 1 << 60
    for q in range(n):
        v = by_dist[s, q]
        if dist[s, v] > h:
            break
        if dist[s, v] + dist[v, t] != h:
            continue
        if v == s:
            val_max[v] = 0
            val_sum[v] = 0
            continue
        bm = big
        bs = big
        ba = -1
        bu = -1
        for k in range(ptr[v], ptr[v + 1]):
            u = src[k]
            if dist[s, u] != dist[s, v] - 1 or dist[s, u] + dist[u, t] != h:
                continue
            a = aid[k]
            w = load[a] - own[a]
            if mode == 2:
                if a == forbid or w >= top or val_max[u] >= big:
                    continue
                m = val_max[u] + (1 if w == top - 1 else 0)
                sm = val_sum[u] + w
            else:
                m = val_max[u] if val_max[u] > w else w
                sm = val_sum[u] + w
            if mode == 0:
                better = sm < bs or (sm == bs and m < bm)
            else:
                better = m < bm or (m == bm and sm < bs)
            if better:
                bm = m
                bs = sm
                ba = a
                bu = u
        val_max[v] = bm
        val_sum[v] = bs
        pred_arc[v] = ba
        pred_node[v] = bu
    return val_max[t], val_sum[t]


@njit(cache=True)
def _install(paths, p, s, t, h, pred_node):
    v = t
    k = h
    while True:
        paths[p, k] = v
        if v == s:
            break
        v = pred_node[v]
        k -= 1


@njit(cache=True)
def reroute(paths, lens, dist, by_dist, ptr, src, aid, arc_of, n_arcs, sweeps):
    """Two-phase congestion reduction, in place; returns final max load.

    Phase 1 is best-response descent on the sum of squared loads (each move
    strictly lowers it). Phase 2 repeatedly relieves edges at the maximum
    load while the moved path stays strictly below it.
    """
    n = dist.shape[0]
    npairs = paths.shape[0]
    load = np.zeros(n_arcs, dtype=np.int64)
    for p in range(npairs):
        if lens[p] > 0:
            for a in _path_arcs(paths[p], lens[p], arc_of, n):
                load[a] += 1
    own = np.zeros(n_arcs, dtype=np.int64)
    val_max = np.zeros(n, dtype=np.int64)
    val_sum = np.zeros(n, dtype=np.int64)
    pred_arc = np.full(n, -1, dtype=np.int64)
    pred_node = np.full(n, -1, dtype=np.int64)

    for mode in (0, 1):
        for _ in range(sweeps):
            top = 0
            for a in range(n_arcs):
                if load[a] > top:
                    top = load[a]
            improved = False
            for p in range(npairs):
                h = lens[p]
                if h < 2:
                    continue
                s = p // n
                t = p % n
                cur = _path_arcs(paths[p], h, arc_of, n)
                cur_sum = 0
                cur_max = 0
                hot = False
                for a in cur:
                    own[a] = 1
                    w = load[a] - 1
                    cur_sum += w
                    if w > cur_max:
                        cur_max = w
                    if load[a] == top:
                        hot = True
                if mode == 1 and not hot:
                    for a in cur:
                        own[a] = 0
                    continue
                bm, bs = _best(s, t, dist, by_dist, ptr, src, aid, load, own, mode,
                               val_max, val_sum, pred_arc, pred_node)
                for a in cur:
                    own[a] = 0
                if mode == 0:
                    take = bs < cur_sum
                else:
                    take = bm + 1 < top
                if take:
                    for a in cur:
                        load[a] -= 1
                    _install(paths, p, s, t, h, pred_node)
                    for a in _path_arcs(paths[p], h, arc_of, n):
                        load[a] += 1
                    improved = True
                    if mode == 1:
                        top = 0
                        for a in range(n_arcs):
                            if load[a] > top:
                                top = load[a]
            if not improved:
                break
    top = 0
    for a in range(n_arcs):
        if load[a] > top:
            top = load[a]
    return top


@njit(cache=True)
def _apply(paths, lens, p, newpath, load, arc_of, n):
    h = lens[p]
    for a in _path_arcs(paths[p], h, arc_of, n):
        load[a] -= 1
    for k in range(h + 1):
        paths[p, k] = newpath[k]
    for a in _path_arcs(paths[p], h, arc_of, n):
        load[a] += 1


@njit(cache=True)
def relieve_chains(paths, lens, dist, by_dist, ptr, src, aid, arc_of, n_arcs, max_rounds):
    """Ejection chains: lower the count of maximum-load arcs one at a time.

    A chain moves a pair off a hot arc onto a geodesic that saturates at
    most one other arc, which is relieved the same way, until some move
    saturates nothing. Chains are verified after application and undone
    when moves interfered. Returns the final max load.
    """
    n = dist.shape[0]
    npairs = paths.shape[0]
    width = paths.shape[1]
    big = 1 << 60
    load = np.zeros(n_arcs, dtype=np.int64)
    for p in range(npairs):
        if lens[p] > 0:
            for a in _path_arcs(paths[p], lens[p], arc_of, n):
                load[a] += 1
    own = np.zeros(n_arcs, dtype=np.int64)
    val_max = np.zeros(n, dtype=np.int64)
    val_sum = np.zeros(n, dtype=np.int64)
    pred_arc = np.full(n, -1, dtype=np.int64)
    pred_node = np.full(n, -1, dtype=np.int64)
    upt = np.zeros(n_arcs + 1, dtype=np.int64)
    par_arc = np.full(n_arcs, -1, dtype=np.int64)
    par_pair = np.full(n_arcs, -1, dtype=np.int64)
    par_path = np.full((n_arcs, width), -1, dtype=np.int64)
    seen = np.zeros(n_arcs, dtype=np.bool_)
    queue = np.empty(n_arcs, dtype=np.int64)
    saved = np.empty((n_arcs + 1, width), dtype=np.int64)
    saved_pair = np.empty(n_arcs + 1, dtype=np.int64)
    tmp = np.empty(width, dtype=np.int64)

    for _ in range(max_rounds):
        top = 0
        for a in range(n_arcs):
            if load[a] > top:
                top = load[a]
        if top <= 1:
            return top
        nhot = 0
        for a in range(n_arcs):
            if load[a] == top:
                nhot += 1
        # users of every arc, CSR
        upt[:] = 0
        for p in range(npairs):
            if lens[p] > 0:
                for a in _path_arcs(paths[p], lens[p], arc_of, n):
                    upt[a + 1] += 1
        for a in range(n_arcs):
            upt[a + 1] += upt[a]
        fill = upt[:-1].copy()
        users = np.empty(upt[n_arcs], dtype=np.int64)
        for p in range(npairs):
            if lens[p] > 0:
                for a in _path_arcs(paths[p], lens[p], arc_of, n):
                    users[fill[a]] = p
                    fill[a] += 1

        progress = False
        for e0 in range(n_arcs):
            if load[e0] != top:
                continue
            seen[:] = False
            seen[e0] = True
            qh = 0
            qt = 1
            queue[0] = e0
            term_arc = -1
            term_pair = -1
            while qh < qt and term_arc < 0:
                x = queue[qh]
                qh += 1
                for k in range(upt[x], upt[x + 1]):
                    q = users[k]
                    h = lens[q]
                    if h < 2:
                        continue
                    s = q // n
                    t = q % n
                    cur = _path_arcs(paths[q], h, arc_of, n)
                    for a in cur:
                        own[a] = 1
                    cnt, _sm = _best(s, t, dist, by_dist, ptr, src, aid, load, own, 2,
                                     val_max, val_sum, pred_arc, pred_node, top, x)
                    for a in cur:
                        own[a] = 0
                    if cnt >= big or cnt > 1:
                        continue
                    _install(tmp.reshape(1, width), 0, s, t, h, pred_node)
                    if cnt == 0:
                        term_arc = x
                        term_pair = q
                        break
                    # the single arc this move would saturate
                    f = -1
                    for a in _path_arcs(tmp, h, arc_of, n):
                        if load[a] - (1 if _uses(paths[q], h, arc_of, n, a) else 0) == top - 1:
                            f = a
                    if f < 0 or seen[f]:
                        continue
                    seen[f] = True
                    par_arc[f] = x
                    par_pair[f] = q
                    par_path[f, :] = tmp
                    queue[qt] = f
                    qt += 1
            if term_arc < 0:
                continue
            # apply terminal move, then walk the chain back to e0
            nsav = 0
            saved_pair[nsav] = term_pair
            saved[nsav, :] = paths[term_pair]
            nsav += 1
            _apply(paths, lens, term_pair, tmp, load, arc_of, n)
            x = term_arc
            while x != e0:
                q = par_pair[x]
                saved_pair[nsav] = q
                saved[nsav, :] = paths[q]
                nsav += 1
                _apply(paths, lens, q, par_path[x], load, arc_of, n)
                x = par_arc[x]
            new_top = 0
            new_hot = 0
            for a in range(n_arcs):
                if load[a] > new_top:
                    new_top = load[a]
            for a in range(n_arcs):
                if load[a] == top:
                    new_hot += 1
            if new_top < top or (new_top == top and new_hot < nhot):
                progress = True
                break
            for j in range(nsav - 1, -1, -1):
                _apply(paths, lens, saved_pair[j], saved[j], load, arc_of, n)
        if not progress:
            break
    top = 0
    for a in range(n_arcs):
        if load[a] > top:
            top = load[a]
    return top


@njit(cache=True)
def _uses(path, h, arc_of, n, a):
    for k in range(h):
        if arc_of[path[k] * n + path[k + 1]] == a:
            return True
    return False
