"""Generators for the example graph families and random test graphs."""

from __future__ import annotations

import itertools

import numpy as np

from .core import DirectedGraph, GraphError, GraphSchedule

FAMILIES = (
    "ring",
    "chain",
    "hypercube",
    "star",
    "two_star",
    "binary_tree",
    "grid",
    "barbell",
    "butterfly",
    "complete",
)


def _check(ok: bool, family: str, constraint: str, value: int) -> None:
    if not ok:
        raise GraphError(f"{family}: size parameter must satisfy {constraint}, got {value}")


def ring(n: int) -> DirectedGraph:
    _check(n >= 3 and n % 2 == 1, "ring", "odd n >= 3", n)
    return DirectedGraph.from_undirected(n, [(i, (i + 1) % n) for i in range(n)], f"ring-{n}")


def chain(n: int) -> DirectedGraph:
    _check(n >= 2, "chain", "n >= 2", n)
    return DirectedGraph.from_undirected(n, [(i, i + 1) for i in range(n - 1)], f"chain-{n}")


def hypercube(p: int) -> DirectedGraph:
    _check(p >= 1, "hypercube", "dimension p >= 1", p)
    n = 1 << p
    links = [(i, i ^ (1 << b)) for i in range(n) for b in range(p)]
    return DirectedGraph.from_undirected(n, links, f"hypercube-{p}")


def star(n: int) -> DirectedGraph:
    """Center is node 0."""
    _check(n >= 3, "star", "n >= 3", n)
    return DirectedGraph.from_undirected(n, [(0, i) for i in range(1, n)], f"star-{n}")


def two_star(n: int) -> DirectedGraph:
    """Centers are nodes 0 and n/2."""
    _check(n >= 4 and n % 2 == 0, "two_star", "even n >= 4", n)
    h = n // 2
    links = [(0, i) for i in range(1, h)] + [(h, h + i) for i in range(1, h)] + [(0, h)]
    return DirectedGraph.from_undirected(n, links, f"two_star-{n}")


def binary_tree(p: int) -> DirectedGraph:
    """Full binary tree of depth p in heap order (root 0)."""
    _check(p > 1, "binary_tree", "depth p > 1", p)
    n = (1 << (p + 1)) - 1
    links = [(k, c) for k in range(n) for c in (2 * k + 1, 2 * k + 2) if c < n]
    return DirectedGraph.from_undirected(n, links, f"binary_tree-{p}")


def grid(p: int) -> DirectedGraph:
    """p x p grid, node (r, c) is r*p + c."""
    _check(p >= 2 and p % 2 == 0, "grid", "even side p >= 2", p)
    links = []
    for r in range(p):
        for c in range(p):
            if c + 1 < p:
                links.append((r * p + c, r * p + c + 1))
            if r + 1 < p:
                links.append((r * p + c, (r + 1) * p + c))
    return DirectedGraph.from_undirected(p * p, links, f"grid-{p}")


def barbell_positions(p: int) -> np.ndarray:
    """Position of every barbell node on the axis -p..p.

    Nodes of the left clique sit at -p, nodes of the right clique at p and
    the line nodes at 1-p..p-1. Doubles as the test vector for the cubic gap.
    """
    left = [-p] * (p - 1)
    line = list(range(-p, p + 1))
    right = [p] * (p - 1)
    return np.array(left + line + right, dtype=float)


def barbell(p: int) -> DirectedGraph:
    """Two p-cliques joined by a line; n = 4p - 1.

    Node order: the p-1 extra nodes of the left clique, then the line
    positions -p..p, then the p-1 extra nodes of the right clique.
    """
    _check(p >= 2, "barbell", "clique size p >= 2", p)
    n = 4 * p - 1
    left = list(range(p - 1)) + [p - 1]
    line = list(range(p - 1, p - 1 + 2 * p + 1))
    right = [line[-1]] + list(range(line[-1] + 1, n))
    links = list(itertools.combinations(left, 2)) + list(itertools.combinations(right, 2))
    links += list(zip(line[:-1], line[1:]))
    return DirectedGraph.from_undirected(n, links, f"barbell-{p}")


def butterfly(m: int) -> DirectedGraph:
    """Two mirrored halves of m nodes joined by a bidirectional edge; n = 2m."""
    _check(m >= 3, "butterfly", "half-size m >= 3", m)
    n = 2 * m

    def bar(i: int) -> int:  # 1-based mirror
        return n - i + 1

    one_based = [(i + 1, i) for i in range(1, m)] + [(1, i) for i in range(1, m + 1)]
    one_based += [(bar(i), bar(j)) for i, j in one_based]
    one_based += [(m, bar(m)), (bar(m), m)]
    return DirectedGraph.from_edges(n, [(i - 1, j - 1) for i, j in one_based], f"butterfly-{m}")


def complete(n: int) -> DirectedGraph:
    _check(n >= 1, "complete", "n >= 1", n)
    return DirectedGraph.from_edges(
        n, [(i, j) for i in range(n) for j in range(n)], f"complete-{n}"
    )


_BUILDERS = {
    "ring": ring,
    "chain": chain,
    "hypercube": hypercube,
    "star": star,
    "two_star": two_star,
    "binary_tree": binary_tree,
    "grid": grid,
    "barbell": barbell,
    "butterfly": butterfly,
    "complete": complete,
}


def make_family(family: str, size_param: int) -> DirectedGraph:
    """Build a member of one of the named families.

    ``size_param`` is n for ring/chain/star/two_star/complete, the dimension
    for hypercube, the depth for binary_tree, the side for grid, the clique
    size for barbell and the half-size for butterfly.
    """
    try:
        builder = _BUILDERS[family]
    except KeyError:
        raise GraphError(f"unknown family {family!r}; choose from {FAMILIES}") from None
    return builder(int(size_param))


def random_connected_graph(
    n: int, rng: np.random.Generator, extra: float = 0.3
) -> DirectedGraph:
    """Uniform random spanning tree plus each remaining link with prob ``extra``."""
    if n < 1:
        raise GraphError("n must be positive")
    order = rng.permutation(n)
    links = set()
    for k in range(1, n):
        a, b = int(order[k]), int(order[rng.integers(k)])
        links.add((min(a, b), max(a, b)))
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in links and rng.random() < extra:
                links.add((i, j))
    return DirectedGraph.from_undirected(n, links, f"random-{n}")


def random_schedule(
    n: int, steps: int, rng: np.random.Generator, extra: float = 0.3
) -> GraphSchedule:
    """Finite schedule of independent random connected bidirectional graphs."""
    return GraphSchedule.sequence(
        [random_connected_graph(n, rng, extra) for _ in range(steps)], f"random-{n}x{steps}"
    )
