"""Averaging iterations x(t) = A(t) x(t-1), decay measurements and scenarios."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import matrices as mx
from . import spectral as sp
from . import config
from .graphs.core import GraphError, GraphSchedule
from .graphs.families import two_star

MAX_STEPS = 1_000_000
RATIO_FLOOR = 1e-24  # relative variance level where contraction_check stops


@dataclass
class Trajectory:
    x0: np.ndarray
    t: np.ndarray
    V: np.ndarray  # squared pi-norm of the disagreement, pi of the current step
    N: np.ndarray  # max - min
    x_final: np.ndarray
    rule: str
    schedule_ref: str = ""
    seed: int | None = None
    perron_constant: bool = True
    consensus_value: float | None = None
    pi_mean: np.ndarray | None = field(default=None, repr=False)

    @property
    def steps(self) -> int:
        return int(self.t[-1])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "V", "N"])
        for row in zip(self.t.tolist(), self.V.tolist(), self.N.tolist()):
            w.writerow([row[0], repr(row[1]), repr(row[2])])
        return buf.getvalue()

    def header(self) -> dict:
        est = empirical_rate(self)
        return {
            "schedule": self.schedule_ref,
            "rule": self.rule,
            "seed": self.seed,
            "steps": self.steps,
            "rho_hat": est.rho_hat,
            "converged": est.converged,
            "perron_constant": self.perron_constant,
            "consensus_value": self.consensus_value,
        }

    def dump(self, stem: str | Path) -> None:
        stem = Path(stem)
        stem.with_suffix(".csv").write_text(self.to_csv())
        stem.with_suffix(".json").write_text(json.dumps(self.header(), indent=2, sort_keys=True))


class _MatrixCache:
    """Matrices and Perron vectors per distinct schedule graph."""

    def __init__(self, schedule: GraphSchedule, rule: str, q):
        self.schedule = schedule
        self.rule = rule
        self.q = q
        self._mats: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def at(self, t: int) -> tuple[np.ndarray, np.ndarray]:
        g = self.schedule.graph_at(t)
        key = (t - 1) % len(self.schedule.graphs)
        if key not in self._mats:
            if not g.is_strongly_connected():
                raise mx.AssumptionError(f"A1 fails at step {t}: graph not strongly connected")
            m = mx.build(self.rule, g, self.q)
            self._mats[key] = (m.entries, mx.perron(m).entries)
        return self._mats[key]


def _variance(x: np.ndarray, pi: np.ndarray) -> float:
    y = x - np.dot(pi, x)
    return float(np.dot(pi, y * y))


def simulate(
    schedule: GraphSchedule,
    rule: str,
    x0,
    T: int,
    q=None,
    seed: int | None = None,
    stop_at: float | None = None,
) -> Trajectory:
    """Run T steps (fewer if N(x) drops below ``stop_at``); one snapshot per step."""
    if T < 1 or T > MAX_STEPS:
        raise ValueError(f"T must be in [1, {MAX_STEPS}], got {T}")
    if schedule.limit is not None and T > schedule.limit:
        raise GraphError(f"schedule only defines {schedule.limit} steps, asked for {T}")
    x = np.array(x0, dtype=float)
    if x.shape != (schedule.n,):
        raise ValueError(f"x0 must have length {schedule.n}")
    if stop_at is None:
        stop_at = config.TOL.converged_seminorm
    cache = _MatrixCache(schedule, rule, q)
    _, pi1 = cache.at(1)
    ts, Vs, Ns = [0], [_variance(x, pi1)], [sp.seminorm_N(x)]
    pis = {tuple(cache.at(t)[1]) for t in range(1, min(T, len(schedule.graphs)) + 1)}
    constant = all(np.allclose(p, pi1, rtol=0, atol=1e-12) for p in map(np.array, pis))
    means = [float(np.dot(pi1, x))]
    for t in range(1, T + 1):
        a, pi = cache.at(t)
        x = a @ x
        ts.append(t)
        Vs.append(_variance(x, pi))
        Ns.append(float(x.max() - x.min()))
        if constant:
            means.append(float(np.dot(pi, x)))
        if Ns[-1] < stop_at:
            break
    return Trajectory(
        x0=np.array(x0, dtype=float),
        t=np.array(ts),
        V=np.array(Vs),
        N=np.array(Ns),
        x_final=x,
        rule=rule,
        schedule_ref=schedule.name,
        seed=seed,
        perron_constant=constant,
        consensus_value=means[0] if constant else None,
        pi_mean=np.array(means) if constant else None,
    )


@dataclass(frozen=True)
class RateEstimate:
    rho_hat: float
    converged: bool
    window_start: int = 0


def empirical_rate(traj: Trajectory, window: float = 0.5) -> RateEstimate:
    """exp of the least-squares slope of log N(x(t)) over the trailing window.

    Only snapshots with N above 10 machine epsilons count; with fewer than
    ten of those the trajectory is reported as converged (rate 0).
    """
    if not 0 < window <= 1:
        raise ValueError("window must be a fraction in (0, 1]")
    floor = 10 * np.finfo(float).eps
    live = np.nonzero(traj.N > floor)[0]
    if live.size < 10 or traj.N[0] <= floor:
        return RateEstimate(0.0, True)
    last = int(live[-1])
    first = int(last - math.floor(window * last))
    idx = live[live >= first]
    if idx.size < 10:
        idx = live[-10:]
    slope = np.polyfit(traj.t[idx].astype(float), np.log(traj.N[idx]), 1)[0]
    return RateEstimate(float(math.exp(slope)), False, int(traj.t[idx[0]]))


def random_x0(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform on [-1, 1]^n, mean removed."""
    x = rng.uniform(-1.0, 1.0, n)
    return x - x.mean()


# -- scenarios ----------------------------------------------------------------


def ot_two_star_schedule(n: int) -> GraphSchedule:
    """Period-n/2 schedule of relabelled two-stars with a travelling centre.

    Roles 0 and h = n/2 are the centres. Step 1 swaps the two centre
    agents; at step r = 2..h the agent holding centre role 0 trades places
    with the agent in leaf role r - 1 of the same star. The h graphs then
    repeat. Under EqualNeighbor this keeps high-weight centres moving and
    slows consensus down, while Metropolis stays quadratic.
    """
    if n < 6 or n % 2:
        raise GraphError(f"ot_two_star needs even n >= 6, got {n}")
    h = n // 2
    base = two_star(n)
    perm = list(range(n))  # perm[role] = agent
    graphs = []
    for r in range(h):
        b = h if r == 0 else r
        perm[0], perm[b] = perm[b], perm[0]
        graphs.append(base.relabel(perm))
    return GraphSchedule.periodic(graphs, f"ot_two_star-{n}")


@dataclass
class ContractionReport:
    worst_ratio: float
    beta: float  # sup over steps of lambda_2(A^dag A)
    violations: int
    trials: int
    steps: int

    @property
    def ok(self) -> bool:
        return self.violations == 0


def contraction_check(
    schedule: GraphSchedule,
    rule: str,
    trials: int = 5,
    seed: int = 0,
    T: int | None = None,
    q=None,
) -> ContractionReport:
    """Check V(t) <= V(t-1) sup_t lambda_2(A(t)^dag A(t)) along random runs.

    Requires a constant Perron vector; the worst observed per-step ratio
    V(t)/V(t-1) is reported. A run stops once V has dropped by a factor
    ``RATIO_FLOOR``, where the ratio would only measure rounding.
    """
    T = T or schedule.limit or len(schedule.graphs)
    cache = _MatrixCache(schedule, rule, q)
    period = min(T, len(schedule.graphs))
    beta = 0.0
    pi0 = cache.at(1)[1]
    for t in range(1, period + 1):
        a, pi = cache.at(t)
        if not np.allclose(pi, pi0, rtol=0, atol=1e-12):
            raise mx.AssumptionError(f"A3 fails at step {t}: Perron vector changes")
        beta = max(beta, sp.reversible_spectrum(mx.gram(a, pi), pi).lambda2)
    rng = np.random.default_rng(seed)
    worst = 0.0
    bad = 0
    for _ in range(trials):
        x = random_x0(schedule.n, rng)
        v = _variance(x, pi0)
        # below this the ratios measure rounding noise, not the dynamics
        floor = v * RATIO_FLOOR
        for t in range(1, T + 1):
            a, pi = cache.at(t)
            x = a @ x
            nv = _variance(x, pi)
            if nv > v * beta + 1e-12:
                bad += 1
            worst = max(worst, nv / v)
            v = nv
            if v < floor:
                break
    return ContractionReport(worst, beta, bad, trials, T)
