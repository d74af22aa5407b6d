"""Spectral-gap and convergence-rate bounds, and reports checking them.

Graph metrics always refer to G_P, the graph of the matrix (the reverse
of the communication graph). For the bidirectional graphs used with the
reversible rules the two coincide.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from . import matrices as mx
from . import spectral as sp
from . import config
from .graphs.core import DirectedGraph, GraphSchedule, PathFamily
from .graphs import metrics as gm
from .matrices import AssumptionError, MatrixError, StochasticMatrix, _as_array, _pi_array


# -- analytic and cut-based bounds ----------------------------------------


def eta_bound(P, pi=None) -> float:
    """1 - 2 mu(P)/(n - 1), valid for reversible P."""
    a = _as_array(P)
    n = a.shape[0]
    return 1.0 - 2.0 * sp.mu(a, _pi_array(a, pi)) / (n - 1)


def analytic_gram_bound(A, pi=None) -> float:
    """Bound 1 - alpha(A)/(n - 1) on lambda_2(A^dag A); no reversibility needed."""
    a = _as_array(A)
    if (np.diag(a) <= 0).any():
        raise MatrixError("analytic gram bound needs a positive diagonal")
    return 1.0 - mx.alpha(a, pi) / (a.shape[0] - 1)


# -- path-based bounds -----------------------------------------------------


def path_length(P, pi, path: Sequence[int]) -> float:
    """P-length: sum over the steps (u, v) of 1/(pi_u P_uv)."""
    a = _as_array(P)
    p = _pi_array(a, pi)
    total = 0.0
    for u, v in zip(path[:-1], path[1:]):
        w = p[u] * a[u, v]
        if w <= 0:
            raise MatrixError(f"path {tuple(path)} uses the zero entry P[{u}, {v}]")
        total += 1.0 / w
    return total


def kappa(P, pi, family: PathFamily) -> float:
    """max over pairs of the harmonic combination of the P-lengths of Gamma_ij."""
    if not family.edge_disjoint:
        raise MatrixError("kappa needs a family of edge-disjoint path sets")
    a = _as_array(P)
    p = _pi_array(a, pi)
    worst = 0.0
    for pair, plist in family.paths.items():
        cond = sum(1.0 / path_length(a, p, path) for path in plist)
        worst = max(worst, 1.0 / cond)
    return worst


def kappa_tilde(P, pi, family: PathFamily) -> float:
    """max over edges e of sum_{gamma_ij through e} |gamma_ij|_P pi_i pi_j."""
    if any(len(ps) != 1 for ps in family.paths.values()):
        raise MatrixError("kappa_tilde needs exactly one path per pair")
    a = _as_array(P)
    p = _pi_array(a, pi)
    load: dict[tuple[int, int], float] = {}
    for (i, j), (path,) in family.paths.items():
        w = path_length(a, p, path) * p[i] * p[j]
        for e in zip(path[:-1], path[1:]):
            load[e] = load.get(e, 0.0) + w
    return max(load.values())


def kappa_bound(P, pi, family: PathFamily) -> float:
    return 1.0 - 1.0 / kappa(P, pi, family)


def kappa_tilde_bound(P, pi, family: PathFamily) -> float:
    return 1.0 - 1.0 / kappa_tilde(P, pi, family)


# -- metric-based corollaries -----------------------------------------------


@dataclass(frozen=True)
class GraphMetrics:
    """Combinatorial inputs of the geometric bounds for one graph."""

    n: int
    diameter: int
    edge_connectivity: int
    normalized_diameter: Fraction
    normalized_diameter_k: int
    bottleneck: int
    d_max: int
    d_min: int
    num_edges: int


@lru_cache(maxsize=256)
def graph_metrics(g: DirectedGraph) -> GraphMetrics:
    fam = gm.geodesic_family(g, "congestion_reroute")
    return GraphMetrics(
        n=g.n,
        diameter=gm.diameter(g),
        edge_connectivity=gm.edge_connectivity(g),
        normalized_diameter=gm.normalized_diameter(g),
        normalized_diameter_k=gm.normalized_diameter_k(g),
        bottleneck=gm.bottleneck_measure(g, fam),
        d_max=g.d_max,
        d_min=g.d_min,
        num_edges=g.num_edges,
    )


@lru_cache(maxsize=256)
def _families(g: DirectedGraph) -> tuple[PathFamily, PathFamily]:
    k = gm.normalized_diameter_k(g)
    return gm.disjoint_path_family(g, k), gm.geodesic_family(g, "congestion_reroute")


def beta_b(P, pi=None, metrics: GraphMetrics | None = None) -> float:
    """1 - alpha(P)/delta_*(G_P)."""
    a = _as_array(P)
    p = _pi_array(a, pi)
    m = metrics or graph_metrics(_support(P))
    return 1.0 - mx.alpha(a, p) / float(m.normalized_diameter)


def beta_ds(P, pi=None, metrics: GraphMetrics | None = None) -> float:
    """1 - alpha(P)/(pi_max^2 delta(G_P) b(G_P))."""
    a = _as_array(P)
    p = _pi_array(a, pi)
    m = metrics or graph_metrics(_support(P))
    return 1.0 - mx.alpha(a, p) / (float(p.max()) ** 2 * m.diameter * m.bottleneck)


def _support(P) -> DirectedGraph:
    if isinstance(P, StochasticMatrix):
        return P.support
    a = _as_array(P)
    i, j = np.nonzero(a)
    return DirectedGraph.from_edges(a.shape[0], zip(i.tolist(), j.tolist()))


# -- quadratic closed forms ---------------------------------------------------


def quadratic_metropolis_bound(n: int) -> float:
    return 1.0 - 1.0 / (4 * n * n)


def quadratic_lazy_bound(n: int) -> float:
    return 1.0 - 1.0 / (8 * n * n)


def quadratic_en_bound(n: int, dmin: int, dmax: int) -> float:
    if dmin > dmax:
        raise ValueError(f"dmin={dmin} exceeds dmax={dmax}")
    return 1.0 - 1.0 / ((3 + dmax - dmin) * n * n)


# -- schedule-level rates -----------------------------------------------------


@dataclass(frozen=True)
class RateBound:
    corollary: float  # 1 - min(2a, 1/min(kappa, kappa_tilde))
    theorem: float  # sup_t sigma_2(A(t))
    a: float
    kappa: float
    kappa_tilde: float

    @property
    def value(self) -> float:
        return min(self.corollary, self.theorem)


def _check_schedule(schedule: GraphSchedule, rule: str, q, need_reversible: bool):
    mats = mx.schedule_matrices(schedule, rule, q)
    pis = [mx.perron(m).entries for m in mats]
    for t, (m, p) in enumerate(zip(mats, pis), start=1):
        if (m.diagonal <= 0).any():
            raise AssumptionError(f"A1 fails at step {t}: zero diagonal entry")
        if need_reversible and not mx.is_reversible(m, config.TOL.reversible, p):
            raise AssumptionError(f"A4 fails at step {t}: matrix is not reversible")
    if need_reversible and not all(np.allclose(p, pis[0], rtol=0, atol=1e-12) for p in pis):
        bad = next(t for t, p in enumerate(pis, start=1) if not np.allclose(p, pis[0], rtol=0, atol=1e-12))
        raise AssumptionError(f"A3 fails at step {bad}: Perron vector changes")
    return mats, pis


def reversible_rate_bound(schedule: GraphSchedule, rule: str, q=None) -> RateBound:
    """Corollary bound from uniform kappa, kappa_tilde and a; plus sup sigma_2.

    kappa uses k edge-disjoint paths at the k minimising delta_k/k, and
    kappa_tilde the rerouted geodesic family, each on the matrix graph.
    """
    mats, pis = _check_schedule(schedule, rule, q, need_reversible=True)
    a = min(float(m.diagonal.min()) for m in mats)
    ks, kts, sig = [], [], []
    for m, p in zip(mats, pis):
        fam_k, fam_g = _families(m.support)
        ks.append(kappa(m, p, fam_k))
        kts.append(kappa_tilde(m, p, fam_g))
        sig.append(sp.second_singular(m, p))
    k, kt = max(ks), max(kts)
    cor = 1.0 - min(2.0 * a, 1.0 / min(k, kt))
    return RateBound(cor, max(sig), a, k, kt)


@dataclass(frozen=True)
class SmallVariationBound:
    value: float
    nu: float
    sup_sigma2: float

    @property
    def vacuous(self) -> bool:
        return self.value >= 1.0


def small_variation_rate_bound(schedule: GraphSchedule, rule: str, q=None) -> SmallVariationBound:
    """nu * sup_t sigma_2(A(t)); flagged vacuous when it reaches 1."""
    mats, pis = _check_schedule(schedule, rule, q, need_reversible=False)
    inf = mx.schedule_infima(schedule, rule, q)
    sup = max(sp.second_singular(m, p) for m, p in zip(mats, pis))
    return SmallVariationBound(inf.nu * sup, inf.nu, sup)


def corollary_rate_bound(g: DirectedGraph, rule: str, q=None, routes: str = "all") -> float:
    """Rate bound of the per-rule corollaries, from alpha, pi_max and metrics.

    1 - min(2a, max(alpha/delta_*, alpha/(pi_max^2 delta b))), with the extra
    term 1/(4b) for Metropolis (kappa_tilde(M) <= 4b). ``routes="b"`` keeps
    only the normalized-diameter term, the form quoted for FixedWeight.
    Relabelled time-varying versions of g give the same value.
    """
    m = mx.build(rule, g, q)
    p = mx.perron(m).entries
    met = graph_metrics(m.support)
    al = mx.alpha(m, p)
    a = float(m.diagonal.min())
    gaps = [al / float(met.normalized_diameter)]
    if routes == "all":
        gaps.append(al / (float(p.max()) ** 2 * met.diameter * met.bottleneck))
        if rule == "metropolis":
            gaps.append(1.0 / (4 * met.bottleneck))
    elif routes != "b":
        raise ValueError(f"routes must be 'all' or 'b', got {routes!r}")
    return 1.0 - min(2.0 * a, max(gaps))


# -- full report -----------------------------------------------------------------


CSV_COLUMNS = (
    "graph", "rule", "n", "lambda2", "sigma2", "eta", "kappa", "kappa_tilde",
    "beta_b", "beta_ds", "cheeger_lo", "cheeger_hi", "rate_bound", "sound",
)


@dataclass
class BoundReport:
    graph_id: str
    rule: str
    n: int
    exact_lambda2: float | None = None
    exact_sigma2: float | None = None
    eta_bound: float | None = None
    kappa_bound: float | None = None
    kappa_tilde_bound: float | None = None
    beta_b: float | None = None
    beta_ds: float | None = None
    beta_a: float | None = None
    cheeger_upper: float | None = None
    cheeger_lower: float | None = None
    gershgorin_floor: float | None = None
    rate_bound: float | None = None
    reversible: bool = True
    sound: dict[str, bool] = field(default_factory=dict)
    absent: dict[str, str] = field(default_factory=dict)

    UPPER = ("eta_bound", "kappa_bound", "kappa_tilde_bound", "beta_b", "beta_ds",
             "beta_a", "cheeger_upper", "rate_bound")

    @property
    def all_sound(self) -> bool:
        return all(self.sound.values())

    @property
    def vacuous(self) -> dict[str, bool]:
        return {k: getattr(self, k) >= 1.0 for k in self.UPPER if getattr(self, k) is not None}

    def to_dict(self) -> dict:
        d = asdict(self)
        d["all_sound"] = self.all_sound
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def csv_row(self) -> dict:
        return {
            "graph": self.graph_id, "rule": self.rule, "n": self.n,
            "lambda2": self.exact_lambda2, "sigma2": self.exact_sigma2,
            "eta": self.eta_bound, "kappa": self.kappa_bound,
            "kappa_tilde": self.kappa_tilde_bound, "beta_b": self.beta_b,
            "beta_ds": self.beta_ds, "cheeger_lo": self.cheeger_lower,
            "cheeger_hi": self.cheeger_upper, "rate_bound": self.rate_bound,
            "sound": self.all_sound,
        }


def reports_to_csv(reports: Sequence[BoundReport]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow({k: _fmt(v) for k, v in r.csv_row().items()})
    return buf.getvalue()


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def full_report(g: DirectedGraph, rule: str, q=None) -> BoundReport:
    """Every applicable bound for (g, rule) with soundness against exact spectra.

    Reversible matrices get the single-matrix bounds on lambda_2(P); the
    others get them on the gram matrix A^dag A, plus the analytic bound.
    Bounds that cannot be evaluated are listed in ``absent`` with a reason.
    """
    A = mx.build(rule, g, q)
    pi = mx.perron(A).entries
    rep = BoundReport(g.name or repr(g), rule, g.n)
    rep.reversible = mx.is_reversible(A, config.TOL.reversible, pi)
    rep.gershgorin_floor = sp.gershgorin_floor(A)
    rep.beta_a = analytic_gram_bound(A, pi)
    rep.exact_sigma2 = sp.second_singular(A, pi)
    target = A if rep.reversible else mx.gram(A, pi)
    spec = sp.reversible_spectrum(target, pi)
    rep.exact_lambda2 = spec.lambda2

    fam_k, fam_g = _families(target.support)
    rep.kappa_bound = kappa_bound(target, pi, fam_k)
    rep.kappa_tilde_bound = kappa_tilde_bound(target, pi, fam_g)
    met = graph_metrics(target.support)
    rep.beta_b = beta_b(target, pi, met)
    rep.beta_ds = beta_ds(target, pi, met)
    if g.n <= config.TOL.max_enum_n:
        cc = sp.cut_constants(target, pi)
        rep.eta_bound = 1.0 - 2.0 * cc.mu / (g.n - 1)
        rep.cheeger_lower, rep.cheeger_upper = cc.cheeger_bracket
    else:
        for key in ("eta_bound", "cheeger_upper", "cheeger_lower"):
            rep.absent[key] = f"exact cut enumeration limited to n <= {config.TOL.max_enum_n}"

    if rep.reversible:
        a = float(A.diagonal.min())
        k = 1.0 / (1.0 - rep.kappa_bound)
        kt = 1.0 / (1.0 - rep.kappa_tilde_bound)
        rep.rate_bound = 1.0 - min(2.0 * a, 1.0 / min(k, kt))
        sigma_target = rep.exact_sigma2
    else:
        # sigma_2 <= sqrt(best bound on lambda_2(A^dag A))
        best = min(v for v in (rep.beta_a, rep.kappa_bound, rep.kappa_tilde_bound) if v is not None)
        rep.rate_bound = math.sqrt(max(best, 0.0))
        sigma_target = rep.exact_sigma2

    tol = config.TOL.soundness
    lam = rep.exact_lambda2
    for key in ("eta_bound", "kappa_bound", "kappa_tilde_bound", "beta_b", "beta_ds", "cheeger_upper"):
        v = getattr(rep, key)
        if v is not None:
            rep.sound[key] = lam <= v + tol
    if rep.cheeger_lower is not None:
        rep.sound["cheeger_lower"] = rep.cheeger_lower - tol <= lam
    rep.sound["beta_a"] = spectral_gram_lambda2(A, pi) <= rep.beta_a + tol
    rep.sound["rate_bound"] = sigma_target <= rep.rate_bound + tol
    rep.sound["gershgorin_floor"] = (
        rep.gershgorin_floor <= spec.lambda_n + tol if rep.reversible else True
    )
    # plain Python scalars keep the CSV and JSON output free of numpy reprs
    for f in fields(rep):
        v = getattr(rep, f.name)
        if isinstance(v, np.floating):
            setattr(rep, f.name, float(v))
    rep.reversible = bool(rep.reversible)
    rep.sound = {k: bool(v) for k, v in rep.sound.items()}
    return rep


def spectral_gram_lambda2(A, pi=None) -> float:
    a = _as_array(A)
    p = _pi_array(a, pi)
    return sp.reversible_spectrum(mx.gram(a, p), p).lambda2
