"""Directed communication graphs, schedules and path families.

Nodes are 0-based integers internally. Text files use 1-based labels.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path


class GraphError(ValueError):
    """Raised for malformed graphs or out-of-range parameters."""


class NotStronglyConnectedError(GraphError):
    """Raised when a metric needs a strongly connected graph."""


Edge = tuple[int, int]
Path = tuple[int, ...]


@dataclass(frozen=True)
class DirectedGraph:
    """Communication topology of one step.

    ``edges`` holds ordered pairs ``(i, j)`` meaning ``i`` sends to ``j``.
    Every node carries a self-loop.
    """

    n: int
    edges: frozenset[Edge]
    name: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise GraphError(f"node count must be positive, got {self.n}")
        for i, j in self.edges:
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise GraphError(f"edge {(i, j)} out of range for n={self.n}")
        missing = [i for i in range(self.n) if (i, i) not in self.edges]
        if missing:
            raise GraphError(f"nodes without self-loop: {missing[:10]}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Edge], name: str = "") -> DirectedGraph:
        """Build a graph, adding the self-loops."""
        es = {(int(i), int(j)) for i, j in edges}
        es.update((i, i) for i in range(n))
        return cls(n, frozenset(es), name)

    @classmethod
    def from_undirected(cls, n: int, links: Iterable[Edge], name: str = "") -> DirectedGraph:
        es = set()
        for i, j in links:
            es.add((i, j))
            es.add((j, i))
        return cls.from_edges(n, es, name)

    # -- adjacency -------------------------------------------------------

    @cached_property
    def arcs(self) -> tuple[Edge, ...]:
        """Non-loop edges in sorted order."""
        return tuple(sorted(e for e in self.edges if e[0] != e[1]))

    @cached_property
    def arc_index(self) -> dict[Edge, int]:
        return {e: k for k, e in enumerate(self.arcs)}

    @cached_property
    def out_neighbors(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.arcs:
            out[i].append(j)
        return tuple(tuple(sorted(o)) for o in out)

    @cached_property
    def in_neighbors(self) -> tuple[tuple[int, ...], ...]:
        inn: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.arcs:
            inn[j].append(i)
        return tuple(tuple(sorted(o)) for o in inn)

    @cached_property
    def degrees(self) -> np.ndarray:
        """In-degrees, self-loop included."""
        return np.array([len(nb) + 1 for nb in self.in_neighbors], dtype=np.int64)

    @property
    def d_max(self) -> int:
        return int(self.degrees.max())

    @property
    def d_min(self) -> int:
        return int(self.degrees.min())

    @property
    def num_edges(self) -> int:
        """|E| with self-loops, each directed edge counted once."""
        return len(self.edges)

    @cached_property
    def out_degrees(self) -> np.ndarray:
        return np.array([len(nb) + 1 for nb in self.out_neighbors], dtype=np.int64)

    def is_bidirectional(self) -> bool:
        return all((j, i) in self.edges for i, j in self.edges)

    def is_eulerian(self) -> bool:
        return bool(np.array_equal(self.degrees, self.out_degrees))

    @cached_property
    def distances(self) -> np.ndarray:
        """All-pairs hop distances, self-loops ignored; -1 when unreachable."""
        if not self.arcs:
            d = np.full((self.n, self.n), -1, dtype=np.int64)
            np.fill_diagonal(d, 0)
            return d
        rows, cols = zip(*self.arcs)
        adj = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(self.n, self.n))
        d = shortest_path(adj, method="D", directed=True, unweighted=True)
        out = np.where(np.isinf(d), -1, d).astype(np.int64)
        out.setflags(write=False)
        return out

    def is_strongly_connected(self) -> bool:
        return bool((self.distances >= 0).all())

    def reverse(self) -> DirectedGraph:
        return DirectedGraph(self.n, frozenset((j, i) for i, j in self.edges), self.name)

    def relabel(self, perm: Sequence[int]) -> DirectedGraph:
        """Graph in which node ``perm[i]`` takes the role of node ``i``."""
        if sorted(perm) != list(range(self.n)):
            raise GraphError("relabeling must be a permutation of the nodes")
        return DirectedGraph(
            self.n, frozenset((perm[i], perm[j]) for i, j in self.edges), self.name
        )

    def __repr__(self) -> str:
        label = f" {self.name}" if self.name else ""
        return f"DirectedGraph(n={self.n}, |E|={self.num_edges}{label})"


def require_strongly_connected(g: DirectedGraph) -> None:
    if not g.is_strongly_connected():
        raise NotStronglyConnectedError(
            f"{g!r} is not strongly connected (infinite diameter)"
        )


@dataclass(frozen=True)
class GraphSchedule:
    """Dynamic communication graph: the sequence G(1), G(2), ...

    ``constant`` repeats one graph, ``periodic`` cycles through ``graphs``
    and ``sequence`` plays ``graphs`` once (``horizon`` = its length).
    """

    kind: str
    graphs: tuple[DirectedGraph, ...]
    period: int = 1
    horizon: int | None = None
    name: str = ""

    def __post_init__(self) -> None:
        if self.kind not in ("constant", "periodic", "sequence"):
            raise GraphError(f"unknown schedule kind {self.kind!r}")
        if not self.graphs:
            raise GraphError("schedule needs at least one graph")
        sizes = {g.n for g in self.graphs}
        if len(sizes) != 1:
            raise GraphError(f"schedule graphs disagree on n: {sorted(sizes)}")
        if self.kind == "constant" and len(self.graphs) != 1:
            raise GraphError("constant schedule holds exactly one graph")
        if self.kind == "periodic" and self.period != len(self.graphs):
            raise GraphError(
                f"period {self.period} does not match {len(self.graphs)} graphs"
            )
        if self.kind == "sequence" and self.horizon not in (None, len(self.graphs)):
            raise GraphError("sequence horizon must equal the number of graphs")

    @classmethod
    def constant(cls, g: DirectedGraph, horizon: int | None = None) -> GraphSchedule:
        return cls("constant", (g,), 1, horizon, g.name)

    @classmethod
    def periodic(cls, graphs: Sequence[DirectedGraph], name: str = "") -> GraphSchedule:
        return cls("periodic", tuple(graphs), len(graphs), None, name)

    @classmethod
    def sequence(cls, graphs: Sequence[DirectedGraph], name: str = "") -> GraphSchedule:
        return cls("sequence", tuple(graphs), len(graphs), len(graphs), name)

    @property
    def n(self) -> int:
        return self.graphs[0].n

    @property
    def limit(self) -> int | None:
        if self.kind == "sequence":
            return len(self.graphs)
        return self.horizon

    def graph_at(self, t: int) -> DirectedGraph:
        """Graph used at step ``t`` (steps start at 1)."""
        if t < 1:
            raise GraphError(f"steps start at 1, got {t}")
        if self.limit is not None and t > self.limit:
            raise GraphError(f"step {t} beyond schedule horizon {self.limit}")
        return self.graphs[(t - 1) % len(self.graphs)]

    def distinct_graphs(self) -> tuple[DirectedGraph, ...]:
        """Each graph the schedule can produce, in first-use order."""
        return self.graphs

    def __iter__(self) -> Iterator[DirectedGraph]:
        t = 1
        while self.limit is None or t <= self.limit:
            yield self.graph_at(t)
            t += 1


@dataclass(frozen=True)
class PathFamily:
    """For each ordered pair (i, j), i != j, a nonempty list of i->j paths."""

    n: int
    paths: dict[Edge, tuple[Path, ...]]
    edge_disjoint: bool = False
    geodesic: bool = False

    def __getitem__(self, pair: Edge) -> tuple[Path, ...]:
        return self.paths[pair]

    def all_paths(self) -> Iterator[tuple[Edge, Path]]:
        for pair in sorted(self.paths):
            for p in self.paths[pair]:
                yield pair, p

    def depth(self) -> int:
        return max(len(p) - 1 for _, p in self.all_paths())

    def validate(self, g: DirectedGraph) -> None:
        """Check the invariants against ``g``; raise GraphError on failure."""
        want = {(i, j) for i in range(self.n) for j in range(self.n) if i != j}
        if set(self.paths) != want:
            raise GraphError("path family must cover every ordered pair")
        dist = g.distances
        for (i, j), plist in self.paths.items():
            if not plist:
                raise GraphError(f"empty path set for pair {(i, j)}")
            used: set[Edge] = set()
            for p in plist:
                if p[0] != i or p[-1] != j:
                    raise GraphError(f"path {p} does not join {i} to {j}")
                steps = list(zip(p[:-1], p[1:]))
                for e in steps:
                    if e[0] == e[1] or e not in g.edges:
                        raise GraphError(f"path {p} uses non-edge {e}")
                if self.edge_disjoint:
                    if used.intersection(steps):
                        raise GraphError(f"paths for {(i, j)} share an edge")
                    used.update(steps)
                if self.geodesic and len(steps) != dist[i, j]:
                    raise GraphError(f"path {p} is not a geodesic")
