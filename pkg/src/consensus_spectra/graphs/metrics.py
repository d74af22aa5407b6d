"""Combinatorial metrics: distances, connectivity, k-diameters, bottlenecks."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _flow, _route
from .core import DirectedGraph, Edge, GraphError, Path, PathFamily, require_strongly_connected


def diameter(g: DirectedGraph) -> int:
    require_strongly_connected(g)
    return int(g.distances.max())


@lru_cache(maxsize=64)
def _residual(g: DirectedGraph):
    return _flow.residual_arrays(g.n, g.arcs)


@lru_cache(maxsize=64)
def edge_connectivity(g: DirectedGraph) -> int:
    """Fewest non-loop edges whose removal breaks strong connectivity.

    For a fixed root r it is the minimum of the r->v and v->r max-flows.
    """
    require_strongly_connected(g)
    if g.n == 1:
        return 0
    tail, head, ptr, order = _residual(g)
    best = int(g.out_degrees.max())
    for v in range(1, g.n):
        best = min(best, _flow.max_flow_value(g.n, tail, head, ptr, order, 0, v, best))
        best = min(best, _flow.max_flow_value(g.n, tail, head, ptr, order, v, 0, best))
    return best


@lru_cache(maxsize=64)
def _depths(g: DirectedGraph) -> np.ndarray:
    kmax = edge_connectivity(g)
    tail, head, ptr, order = _residual(g)
    table = _flow.depth_table(g.n, tail, head, ptr, order, kmax)
    table.setflags(write=False)
    return table


def k_diameter(g: DirectedGraph, k: int) -> int | float:
    """Upper estimate of the k-diameter; ``math.inf`` above the connectivity.

    Each pair gets the min-total-length set of k edge-disjoint paths, so the
    value can exceed the true k-diameter but never undercuts it. It is exact
    for k = 1.
    """
    if k < 1:
        raise GraphError(f"k must be >= 1, got {k}")
    require_strongly_connected(g)
    if g.n == 1:
        return 0
    if k > edge_connectivity(g):
        return math.inf
    if k == 1:
        return diameter(g)
    table = _depths(g)[:, :, k - 1]
    return int(table.max())


def normalized_diameter(g: DirectedGraph) -> Fraction:
    """min over k of k_diameter(g, k) / k, as an exact rational."""
    require_strongly_connected(g)
    if g.n == 1:
        return Fraction(0)
    return min(Fraction(k_diameter(g, k), k) for k in range(1, edge_connectivity(g) + 1))


def normalized_diameter_k(g: DirectedGraph) -> int:
    """Smallest k attaining the normalized diameter."""
    target = normalized_diameter(g)
    for k in range(1, edge_connectivity(g) + 1):
        if Fraction(k_diameter(g, k), k) == target:
            return k
    raise AssertionError("unreachable")


def disjoint_path_family(g: DirectedGraph, k: int) -> PathFamily:
    """k edge-disjoint paths per ordered pair from a min-cost k-flow."""
    require_strongly_connected(g)
    tau = edge_connectivity(g)
    if not 1 <= k <= tau:
        raise GraphError(
            f"k={k} outside [1, {tau}]: by Menger's theorem only "
            f"edge-connectivity many edge-disjoint paths exist for every pair"
        )
    tail, head, ptr, order = _residual(g)
    paths: dict[Edge, tuple[Path, ...]] = {}
    for s in range(g.n):
        for t in range(g.n):
            if s == t:
                continue
            rows = _flow.disjoint_paths(g.n, tail, head, ptr, order, s, t, k)
            paths[(s, t)] = tuple(tuple(int(v) for v in row if v >= 0) for row in rows)
    geo = all(len(p) - 1 == g.distances[pair] for pair, ps in paths.items() for p in ps)
    return PathFamily(g.n, paths, edge_disjoint=True, geodesic=geo)


# -- geodesic families ----------------------------------------------------


def _bfs_lex_path(g: DirectedGraph, s: int, t: int) -> Path:
    """Lexicographically smallest geodesic: always step to the smallest
    neighbor that is one hop closer to the target."""
    dist = g.distances
    path = [s]
    u = s
    while u != t:
        u = next(v for v in g.out_neighbors[u] if dist[v, t] == dist[u, t] - 1)
        path.append(u)
    return tuple(path)


def _dimension_order_paths(g: DirectedGraph) -> dict[Edge, tuple[Path, ...]] | None:
    """Routing that fixes differing bits lowest first, if g is a labelled cube.

    Every arc of that routing carries exactly n/2 paths, which is the optimal
    hypercube congestion; it only serves as a better starting point for the
    generic reroute. Returns None unless every arc flips a single bit and
    every node has all p neighbours.
    """
    n = g.n
    p = n.bit_length() - 1
    if n < 2 or n != 1 << p:
        return None
    for u, v in g.arcs:
        x = u ^ v
        if x & (x - 1):
            return None
    if any(len(g.out_neighbors[u]) - (u in g.out_neighbors[u]) != p for u in range(n)):
        return None
    paths = {}
    for s in range(n):
        for t in range(n):
            if s == t:
                continue
            path = [s]
            u = s
            for b in range(p):
                if (u ^ t) >> b & 1:
                    u ^= 1 << b
                    path.append(u)
            paths[(s, t)] = (tuple(path),)
    return paths


def congestion(g: DirectedGraph, family: PathFamily) -> Counter:
    """Number of family paths crossing each non-loop edge."""
    load: Counter = Counter()
    for _, p in family.all_paths():
        load.update(zip(p[:-1], p[1:]))
    return load


def _max_load(paths: dict[Edge, tuple[Path, ...]]) -> int:
    load: Counter = Counter()
    for ps in paths.values():
        for p in ps:
            load.update(zip(p[:-1], p[1:]))
    return max(load.values()) if load else 0


def _reroute(g: DirectedGraph, paths: dict[Edge, tuple[Path, ...]], sweeps: int = 200) -> None:
    """Congestion reduction among geodesics, in place.

    Best-response descent on the sum of squared edge loads, then greedy
    relief of the maximum-load edges (moved paths must stay strictly below
    the maximum). Both phases are monotone, so the result never routes worse
    than the starting family.
    """
    n = g.n
    dist = np.ascontiguousarray(g.distances, dtype=np.int64)
    by_dist = np.argsort(dist, axis=1, kind="stable").astype(np.int64)
    ptr, src, aid = _route.in_csr(n, g.arcs)
    arc_of = np.full(n * n, -1, dtype=np.int64)
    for k, (u, v) in enumerate(g.arcs):
        arc_of[u * n + v] = k
    width = int(dist.max()) + 1
    arr = np.full((n * n, width), -1, dtype=np.int64)
    lens = np.zeros(n * n, dtype=np.int64)
    for (s, t), (p,) in paths.items():
        arr[s * n + t, : len(p)] = p
        lens[s * n + t] = len(p) - 1
    _route.reroute(arr, lens, dist, by_dist, ptr, src, aid, arc_of, len(g.arcs), sweeps)
    _route.relieve_chains(arr, lens, dist, by_dist, ptr, src, aid, arc_of, len(g.arcs), 100_000)
    for (s, t) in paths:
        row = arr[s * n + t]
        paths[(s, t)] = (tuple(int(v) for v in row[: lens[s * n + t] + 1]),)


def geodesic_family(g: DirectedGraph, strategy: str = "bfs_lex") -> PathFamily:
    """One geodesic per ordered pair.

    ``bfs_lex`` is deterministic lexicographic routing; ``congestion_reroute``
    starts there (or from dimension-order routing on a labelled hypercube,
    when that is less congested) and greedily relieves the most loaded edges.
    """
    require_strongly_connected(g)
    if strategy not in ("bfs_lex", "congestion_reroute"):
        raise GraphError(f"unknown geodesic strategy {strategy!r}")
    paths = {
        (s, t): (_bfs_lex_path(g, s, t),)
        for s in range(g.n)
        for t in range(g.n)
        if s != t
    }
    if strategy == "congestion_reroute":
        seed = _dimension_order_paths(g)
        if seed is not None and _max_load(seed) < _max_load(paths):
            paths = seed
        _reroute(g, paths)
    return PathFamily(g.n, paths, edge_disjoint=True, geodesic=True)


@dataclass(frozen=True)
class BottleneckReport:
    value: int
    lower: Fraction
    upper: int

    @property
    def sandwich_ok(self) -> bool:
        return self.lower <= self.value <= self.upper


def bottleneck_measure(g: DirectedGraph, family: PathFamily) -> int:
    """Maximum edge congestion of a single-geodesic family.

    This over-estimates the bottleneck measure, which minimizes over all
    geodesic families.
    """
    if not family.geodesic or any(len(ps) != 1 for ps in family.paths.values()):
        raise GraphError("bottleneck needs a family of single geodesics")
    load = congestion(g, family)
    return max(load.values()) if load else 0


def bottleneck_report(g: DirectedGraph, family: PathFamily) -> BottleneckReport:
    """Bottleneck value with the (n-1)/edge-connectivity and n^2 sandwich."""
    value = bottleneck_measure(g, family)
    return BottleneckReport(value, Fraction(g.n - 1, edge_connectivity(g)), g.n**2)


def geodesic_degree_sum_check(g: DirectedGraph) -> int:
    """Largest sum of max(d_u, d_v) over the edges of a bfs_lex geodesic.

    Raises AssertionError if some geodesic exceeds 4n.
    """
    if not g.is_bidirectional():
        raise GraphError("degree-sum lemma needs a bidirectional graph")
    require_strongly_connected(g)
    d = g.degrees
    worst = 0
    for s in range(g.n):
        for t in range(g.n):
            if s == t:
                continue
            p = _bfs_lex_path(g, s, t)
            total = int(sum(max(d[u], d[v]) for u, v in zip(p[:-1], p[1:])))
            if total > 4 * g.n:
                raise AssertionError(
                    f"geodesic {p} has degree sum {total} > 4n = {4 * g.n}"
                )
            worst = max(worst, total)
    return worst
