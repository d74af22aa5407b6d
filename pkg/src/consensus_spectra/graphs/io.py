"""Graph and schedule files.

Graph file: first line ``n <count>``, then one ``i j`` directed edge per
line with 1-based labels. Blank lines and ``#`` comments are skipped.
Missing self-loops are added with a warning.

Schedule file: JSON object ``{"kind": ..., "period": ..., "graphs": [...]}``
where ``graphs`` lists graph files relative to the schedule file.
"""

from __future__ import annotations

import json
import logging
from pathlib import Path

from .core import DirectedGraph, GraphError, GraphSchedule

log = logging.getLogger(__name__)


class GraphFileError(GraphError):
    pass


def parse_graph_text(text: str, source: str = "<string>") -> DirectedGraph:
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "n":
                raise GraphFileError(f"{source}:{lineno}: expected 'n <count>', got {raw!r}")
            try:
                n = int(parts[1])
            except ValueError:
                raise GraphFileError(f"{source}:{lineno}: bad node count {parts[1]!r}") from None
            if n < 1:
                raise GraphFileError(f"{source}:{lineno}: node count must be positive")
            continue
        if len(parts) != 2:
            raise GraphFileError(f"{source}:{lineno}: expected 'i j', got {raw!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFileError(f"{source}:{lineno}: non-integer edge {raw!r}") from None
        if not (1 <= i <= n and 1 <= j <= n):
            raise GraphFileError(f"{source}:{lineno}: edge ({i}, {j}) outside 1..{n}")
        edges.append((i - 1, j - 1))
    if n is None:
        raise GraphFileError(f"{source}: empty graph file")
    loops = {i for i, j in edges if i == j}
    if len(loops) < n:
        log.warning("%s: adding %d missing self-loops", source, n - len(loops))
    return DirectedGraph.from_edges(n, edges, Path(source).stem)


def read_graph_file(path: str | Path) -> DirectedGraph:
    path = Path(path)
    return parse_graph_text(path.read_text(), str(path))


def format_graph(g: DirectedGraph) -> str:
    lines = [f"n {g.n}"]
    lines += [f"{i + 1} {j + 1}" for i, j in sorted(g.edges)]
    return "\n".join(lines) + "\n"


def write_graph_file(g: DirectedGraph, path: str | Path) -> None:
    Path(path).write_text(format_graph(g))


def read_schedule_file(path: str | Path) -> GraphSchedule:
    path = Path(path)
    try:
        spec = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise GraphFileError(f"{path}:{exc.lineno}: {exc.msg}") from None
    if not isinstance(spec, dict) or "graphs" not in spec:
        raise GraphFileError(f"{path}: expected an object with a 'graphs' list")
    kind = spec.get("kind", "periodic")
    graphs = [read_graph_file(path.parent / ref) for ref in spec["graphs"]]
    if kind == "constant":
        if len(graphs) != 1:
            raise GraphFileError(f"{path}: constant schedule needs exactly one graph")
        return GraphSchedule.constant(graphs[0], spec.get("horizon"))
    if kind == "periodic":
        period = int(spec.get("period", len(graphs)))
        if period != len(graphs):
            raise GraphFileError(f"{path}: period {period} but {len(graphs)} graphs listed")
        return GraphSchedule.periodic(graphs, path.stem)
    if kind == "sequence":
        return GraphSchedule.sequence(graphs, path.stem)
    raise GraphFileError(f"{path}: unknown schedule kind {kind!r}")
