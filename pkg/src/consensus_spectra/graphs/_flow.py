"""Unit-capacity min-cost flow kernels (successive shortest paths).

Every non-loop arc of the graph gets capacity 1 and cost 1. After the j-th
augmentation the flow is a min-cost j-flow; decomposing it gives j
edge-disjoint paths of minimum total length.
"""

from __future__ import annotations

import numpy as np
from numba import njit


def residual_arrays(n: int, arcs) -> tuple[np.ndarray, ...]:
    """CSR residual network: arc 2e is forward, 2e+1 its reverse."""
    m = len(arcs)
    tail = np.empty(2 * m, dtype=np.int64)
    head = np.empty(2 * m, dtype=np.int64)
    for e, (u, v) in enumerate(arcs):
        tail[2 * e], head[2 * e] = u, v
        tail[2 * e + 1], head[2 * e + 1] = v, u
    order = np.argsort(tail, kind="stable")
    ptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(ptr, tail + 1, 1)
    ptr = np.cumsum(ptr)
    return tail, head, ptr, order.astype(np.int64)


@njit(cache=True)
def _augment(n, tail, head, ptr, order, res, s, t, dist, pred, inq, queue):
    # SPFA on the residual graph; costs +1 forward, -1 on reverse arcs
    big = 1 << 40
    for v in range(n):
        dist[v] = big
        pred[v] = -1
        inq[v] = False
    dist[s] = 0
    qh = 0
    qt = 0
    qn = queue.shape[0]
    queue[qt] = s
    qt = (qt + 1) % qn
    inq[s] = True
    while qh != qt:
        u = queue[qh]
        qh = (qh + 1) % qn
        inq[u] = False
        for k in range(ptr[u], ptr[u + 1]):
            a = order[k]
            if res[a] <= 0:
                continue
            c = 1 if a % 2 == 0 else -1
            v = head[a]
            nd = dist[u] + c
            if nd < dist[v]:
                dist[v] = nd
                pred[v] = a
                if not inq[v]:
                    queue[qt] = v
                    qt = (qt + 1) % qn
                    inq[v] = True
    if dist[t] >= big:
        return False
    v = t
    while v != s:
        a = pred[v]
        res[a] -= 1
        res[a ^ 1] += 1
        v = tail[a]
    return True


@njit(cache=True)
def _decompose(n, head, ptr, order, res, s, t, k, lengths, paths, maxlen):
    """Split the flow into k paths, shortest first; fills ``paths`` rows."""
    used = np.zeros(res.shape[0], dtype=np.bool_)
    pred = np.empty(n, dtype=np.int64)
    seen = np.empty(n, dtype=np.bool_)
    queue = np.empty(n, dtype=np.int64)
    for j in range(k):
        for v in range(n):
            seen[v] = False
            pred[v] = -1
        seen[s] = True
        qh = 0
        qt = 1
        queue[0] = s
        while qh < qt and not seen[t]:
            u = queue[qh]
            qh += 1
            for q in range(ptr[u], ptr[u + 1]):
                a = order[q]
                # forward arcs carrying flow have their reverse residual at 1
                if a % 2 == 1 or res[a ^ 1] <= 0 or used[a]:
                    continue
                v = head[a]
                if not seen[v]:
                    seen[v] = True
                    pred[v] = a
                    queue[qt] = v
                    qt += 1
        # walk back; record nodes reversed
        cnt = 0
        v = t
        while v != s:
            a = pred[v]
            used[a] = True
            cnt += 1
            v = head[a ^ 1]
        lengths[j] = cnt
        if cnt + 1 <= maxlen:
            v = t
            idx = cnt
            while True:
                paths[j, idx] = v
                if v == s:
                    break
                v = head[pred[v] ^ 1]
                idx -= 1
            for r in range(cnt + 1, maxlen):
                paths[j, r] = -1


@njit(cache=True)
def max_flow_value(n, tail, head, ptr, order, s, t, cap):
    """Edge-disjoint s->t path count, capped at ``cap``."""
    res = np.zeros(tail.shape[0], dtype=np.int64)
    for a in range(0, res.shape[0], 2):
        res[a] = 1
    dist = np.empty(n, dtype=np.int64)
    pred = np.empty(n, dtype=np.int64)
    inq = np.empty(n, dtype=np.bool_)
    queue = np.empty(n + 1, dtype=np.int64)
    f = 0
    while f < cap and _augment(n, tail, head, ptr, order, res, s, t, dist, pred, inq, queue):
        f += 1
    return f


@njit(cache=True)
def depth_table(n, tail, head, ptr, order, kmax):
    """depth[s, t, k-1]: depth of the min-cost k-flow decomposition.

    Entries are -1 where k edge-disjoint paths do not exist.
    """
    out = np.full((n, n, kmax), -1, dtype=np.int64)
    res = np.empty(tail.shape[0], dtype=np.int64)
    dist = np.empty(n, dtype=np.int64)
    pred = np.empty(n, dtype=np.int64)
    inq = np.empty(n, dtype=np.bool_)
    queue = np.empty(n + 1, dtype=np.int64)
    lengths = np.empty(kmax, dtype=np.int64)
    dummy = np.empty((kmax, 1), dtype=np.int64)
    for s in range(n):
        for t in range(n):
            if s == t:
                continue
            for a in range(res.shape[0]):
                res[a] = 1 if a % 2 == 0 else 0
            for k in range(1, kmax + 1):
                if not _augment(n, tail, head, ptr, order, res, s, t, dist, pred, inq, queue):
                    break
                _decompose(n, head, ptr, order, res, s, t, k, lengths, dummy, 0)
                mx = 0
                for j in range(k):
                    if lengths[j] > mx:
                        mx = lengths[j]
                out[s, t, k - 1] = mx
    return out


@njit(cache=True)
def disjoint_paths(n, tail, head, ptr, order, s, t, k):
    """k edge-disjoint s->t paths as rows padded with -1; empty if impossible."""
    res = np.zeros(tail.shape[0], dtype=np.int64)
    for a in range(0, res.shape[0], 2):
        res[a] = 1
    dist = np.empty(n, dtype=np.int64)
    pred = np.empty(n, dtype=np.int64)
    inq = np.empty(n, dtype=np.bool_)
    queue = np.empty(n + 1, dtype=np.int64)
    for _ in range(k):
        if not _augment(n, tail, head, ptr, order, res, s, t, dist, pred, inq, queue):
            return np.empty((0, n + 1), dtype=np.int64)
    lengths = np.empty(k, dtype=np.int64)
    paths = np.full((k, n + 1), -1, dtype=np.int64)
    _decompose(n, head, ptr, order, res, s, t, k, lengths, paths, n + 1)
    return paths
