"""Averaging-rule matrices, Perron vectors and pi-adjoints.

All builders take the *communication* graph and return the matrix whose
support is its reverse: ``A[i, k] > 0`` iff ``k`` sends to ``i``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np
from scipy.sparse.csgraph import connected_components

from . import config
from .graphs.core import DirectedGraph, GraphError, GraphSchedule

RULES = ("metropolis", "lazy_metropolis", "equal_neighbor", "fixed_weight")


class MatrixError(ValueError):
    """Contract violations for matrix construction and queries."""


class IrreducibleError(MatrixError):
    pass


class AssumptionError(MatrixError):
    """A schedule step breaks one of the standing assumptions."""


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """Dense row-stochastic matrix with the graph of its positive entries."""

    entries: np.ndarray
    rule: str = ""
    graph_ref: str = ""
    _support: DirectedGraph | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise MatrixError(f"need a square matrix, got shape {a.shape}")
        if (a < 0).any():
            raise MatrixError("entries must be nonnegative")
        dev = np.abs(a.sum(axis=1) - 1).max()
        if dev > config.TOL.row_sum:
            raise MatrixError(f"row sums deviate from 1 by {dev:.3e}")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    @property
    def support(self) -> DirectedGraph:
        """Graph G_P with an edge (i, j) whenever P_ij > 0."""
        if self._support is None:
            i, j = np.nonzero(self.entries)
            object.__setattr__(
                self, "_support", DirectedGraph.from_edges(self.n, zip(i.tolist(), j.tolist()))
            )
        return self._support

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(self.entries)

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def to_json(self) -> str:
        # repr of a float is the shortest string that round-trips (<= 17 digits)
        return json.dumps(
            {"n": self.n, "rows": self.entries.tolist(), "rule": self.rule, "graph_ref": self.graph_ref}
        )

    @classmethod
    def from_json(cls, text: str) -> StochasticMatrix:
        d = json.loads(text)
        a = np.array(d["rows"], dtype=float)
        if a.shape != (d["n"], d["n"]):
            raise MatrixError(f"rows do not form an {d['n']}x{d['n']} matrix")
        return cls(a, d.get("rule", ""), d.get("graph_ref", ""))

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json())


@dataclass(frozen=True, eq=False)
class PerronVector:
    entries: np.ndarray
    residual: float

    def __post_init__(self) -> None:
        self.entries.setflags(write=False)

    @property
    def max(self) -> float:
        return float(self.entries.max())

    @property
    def min(self) -> float:
        return float(self.entries.min())

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def __len__(self) -> int:
        return len(self.entries)


# -- builders -------------------------------------------------------------


def _require_bidirectional(g: DirectedGraph, rule: str) -> None:
    if not g.is_bidirectional():
        raise MatrixError(f"{rule} is defined only on bidirectional graphs; {g!r} is not")


def _from_offdiag(g: DirectedGraph, weight: Callable[[int, int], float], rule: str) -> StochasticMatrix:
    # weight(i, k) for k sending to i
    a = np.zeros((g.n, g.n))
    for k, i in g.arcs:
        a[i, k] = weight(i, k)
    np.fill_diagonal(a, 1.0 - a.sum(axis=1))
    return StochasticMatrix(a, rule, g.name, g.reverse())


def metropolis(g: DirectedGraph) -> StochasticMatrix:
    """Symmetric weights 1/max(d_i, d_j) between neighbours."""
    _require_bidirectional(g, "metropolis")
    d = g.degrees
    return _from_offdiag(g, lambda i, k: 1.0 / max(d[i], d[k]), "metropolis")


def lazy_metropolis(g: DirectedGraph) -> StochasticMatrix:
    """Weights 1/(2 max(d_i - 1, d_j - 1)); every diagonal entry is >= 1/2."""
    _require_bidirectional(g, "lazy_metropolis")
    if g.n < 2:
        raise MatrixError("lazy_metropolis needs n >= 2")
    d = g.degrees
    return _from_offdiag(g, lambda i, k: 0.5 / max(d[i] - 1, d[k] - 1), "lazy_metropolis")


def equal_neighbor(g: DirectedGraph) -> StochasticMatrix:
    d = g.degrees
    a = np.zeros((g.n, g.n))
    for k, i in g.edges:
        a[i, k] = 1.0 / d[i]
    return StochasticMatrix(a, "equal_neighbor", g.name, g.reverse())


def fixed_weight(g: DirectedGraph, q: Sequence[int] | int) -> StochasticMatrix:
    """Weights 1/q_i on in-neighbours; requires q_i >= d_i (self-loop included)."""
    qv = np.broadcast_to(np.asarray(q, dtype=np.int64), (g.n,))
    bad = np.nonzero(qv < g.degrees)[0]
    if bad.size:
        i = int(bad[0])
        raise MatrixError(
            f"fixed_weight needs q_i >= d_i; node {i} has q={qv[i]} < d={g.degrees[i]}"
        )
    return _from_offdiag(g, lambda i, k: 1.0 / qv[i], "fixed_weight")


def build(rule: str, g: DirectedGraph, q: Sequence[int] | int | None = None) -> StochasticMatrix:
    """Dispatch on the rule name. FixedWeight defaults to q_i = d_max(g)."""
    if rule == "metropolis":
        return metropolis(g)
    if rule == "lazy_metropolis":
        return lazy_metropolis(g)
    if rule == "equal_neighbor":
        return equal_neighbor(g)
    if rule == "fixed_weight":
        return fixed_weight(g, g.d_max if q is None else q)
    raise MatrixError(f"unknown rule {rule!r}; choose from {RULES}")


# -- Perron vector and adjoint --------------------------------------------


def _as_array(P) -> np.ndarray:
    return P.entries if isinstance(P, StochasticMatrix) else np.asarray(P, dtype=float)


def is_irreducible(P) -> bool:
    a = _as_array(P)
    ncomp, _ = connected_components(a > 0, directed=True, connection="strong")
    return ncomp == 1


def perron(P) -> PerronVector:
    """Left eigenvector for eigenvalue 1, normalised to sum 1, by linear solve.

    The system (P^T - I) pi = 0 gets its last equation replaced by sum(pi) = 1.
    """
    a = _as_array(P)
    n = a.shape[0]
    if not is_irreducible(a):
        raise IrreducibleError("matrix is reducible; the Perron vector is not unique")
    m = a.T - np.eye(n)
    m[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    pi = np.linalg.solve(m, rhs)
    # one refinement step keeps the residual at rounding level
    pi += np.linalg.solve(m, rhs - m @ pi)
    pi /= pi.sum()
    residual = float(np.abs(a.T @ pi - pi).max())
    if residual > config.TOL.perron_residual or (pi <= 0).any():
        raise MatrixError(f"Perron solve inaccurate: residual {residual:.3e}")
    return PerronVector(pi, residual)


def power_iteration_perron(P, iters: int = 100_000, tol: float = 1e-14) -> np.ndarray:
    """Slow cross-check of ``perron``; used by the tests only."""
    a = _as_array(P)
    x = np.full(a.shape[0], 1.0 / a.shape[0])
    for _ in range(iters):
        y = a.T @ x
        y /= y.sum()
        if np.abs(y - x).max() < tol:
            return y
        x = y
    return x


def _pi_array(P, pi) -> np.ndarray:
    if pi is None:
        return perron(P).entries
    return np.asarray(pi, dtype=float)


def adjoint(P, pi=None) -> StochasticMatrix | np.ndarray:
    """pi-adjoint: (P^dag)_ij = pi_j P_ji / pi_i.

    Returns a StochasticMatrix when the result is row-stochastic (that is,
    when pi is P's Perron vector), a plain array otherwise.
    """
    a = _as_array(P)
    p = _pi_array(a, pi)
    if (p <= 0).any():
        raise MatrixError("pi must be positive")
    adj = (a.T * p[None, :]) / p[:, None]
    if np.abs(adj.sum(axis=1) - 1).max() <= config.TOL.row_sum:
        return StochasticMatrix(adj, "adjoint")
    return adj


def gram(P, pi=None) -> StochasticMatrix:
    """P^dag P with P's own Perron vector; stochastic and reversible."""
    a = _as_array(P)
    if (np.diag(a) <= 0).any():
        raise MatrixError("gram needs a positive diagonal")
    p = _pi_array(a, pi)
    g = ((a.T * p[None, :]) / p[:, None]) @ a
    # remove rounding drift so the row-sum invariant holds
    g /= g.sum(axis=1, keepdims=True)
    return StochasticMatrix(g, "gram")


def detailed_balance_gap(P, pi=None) -> float:
    a = _as_array(P)
    p = _pi_array(a, pi)
    flow = p[:, None] * a
    return float(np.abs(flow - flow.T).max())


def is_reversible(P, tol: float | None = None, pi=None) -> bool:
    return detailed_balance_gap(P, pi) <= (config.TOL.reversible if tol is None else tol)


def alpha(P, pi=None) -> float:
    """min pi_i P_ij over the non-loop edges of G_P (the diagonal is excluded)."""
    a = _as_array(P)
    p = _pi_array(a, pi)
    flow = p[:, None] * a
    np.fill_diagonal(flow, 0.0)
    pos = flow[flow > 0]
    if pos.size == 0:
        raise MatrixError("matrix has no off-diagonal support")
    return float(pos.min())


# -- schedules ------------------------------------------------------------


@dataclass(frozen=True)
class ScheduleInfima:
    a: float
    alpha: float
    nu: float
    perron_constant: bool


def schedule_matrices(
    schedule: GraphSchedule, rule: str, q: Sequence[int] | int | None = None
) -> list[StochasticMatrix]:
    """One matrix per distinct step of the schedule (a full period)."""
    out = []
    for t, g in enumerate(schedule.distinct_graphs(), start=1):
        if not g.is_strongly_connected():
            raise AssumptionError(f"A1 fails at step {t}: graph not strongly connected")
        out.append(build(rule, g, q))
    return out


def schedule_infima(
    schedule: GraphSchedule, rule: str, q: Sequence[int] | int | None = None
) -> ScheduleInfima:
    """a, alpha and nu over one period (or the whole finite sequence).

    For periodic and constant schedules nu also covers the wrap-around
    from the last step of a period to the first step of the next.
    """
    mats = schedule_matrices(schedule, rule, q)
    pis = [perron(m).entries for m in mats]
    a = min(float(m.diagonal.min()) for m in mats)
    al = min(alpha(m, p) for m, p in zip(mats, pis))
    pairs = list(zip(pis[:-1], pis[1:]))
    if schedule.kind != "sequence" and len(pis) > 1:
        pairs.append((pis[-1], pis[0]))
    ratio = max((float((nxt / cur).max()) for cur, nxt in pairs), default=1.0)
    nu = math.sqrt(ratio)
    const = all(np.allclose(p, pis[0], rtol=0, atol=1e-12) for p in pis)
    if const:
        nu = 1.0
    return ScheduleInfima(a, al, nu, const)
