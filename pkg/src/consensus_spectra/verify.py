"""Property suites behind ``consensus-spectra verify``.

Every suite returns a list of :class:`Check` records; a suite passes when
every record does. Suites are deterministic for a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import bounds
from . import config
from . import matrices as mx
from . import sim
from . import spectral as sp
from .graphs.families import barbell_positions, make_family, random_connected_graph, random_schedule

SOUNDNESS_RULES = ("metropolis", "lazy_metropolis", "equal_neighbor")


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    value: float | None = None
    limit: float | None = None
    detail: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "passed", bool(self.passed))
        for key in ("value", "limit"):
            v = getattr(self, key)
            if v is not None:
                object.__setattr__(self, key, float(v))

    def to_dict(self) -> dict:
        return asdict(self)


# -- soundness --------------------------------------------------------------------


def soundness(seed: int = 0, count: int = 200, rules=SOUNDNESS_RULES) -> list[Check]:
    """Every bound of ``full_report`` against the exact spectrum on random graphs.

    One record per (graph, rule); the detail lists any violated bound. The
    ordering of corollaries after propositions is checked on the same
    instances.
    """
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        n = int(rng.integers(4, 13))
        g = random_connected_graph(n, rng)
        for rule in rules:
            rep = bounds.full_report(g, rule)
            bad = sorted(key for key, ok in rep.sound.items() if not ok)
            ordered = (
                rep.beta_b >= rep.kappa_bound - config.TOL.soundness
                and rep.beta_ds >= rep.kappa_tilde_bound - config.TOL.soundness
            )
            if not ordered:
                bad.append("ordering")
            out.append(
                Check(
                    "soundness",
                    f"graph{k}-n{n}-{rule}",
                    not bad,
                    rep.exact_lambda2,
                    None,
                    ",".join(bad),
                )
            )
    return out


# -- identities -------------------------------------------------------------------


def _random_reversible(rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    """P = D^{-1} W for a random symmetric W with positive diagonal; pi ~ row sums."""
    w = rng.random((n, n)) * (rng.random((n, n)) < 0.6)
    w = np.triu(w, 1)
    w = w + w.T
    # a path keeps it irreducible
    idx = np.arange(n - 1)
    w[idx, idx + 1] = w[idx + 1, idx] = 0.1 + rng.random(n - 1)
    w[np.diag_indices(n)] = 0.05 + rng.random(n)
    d = w.sum(axis=1)
    return w / d[:, None], d / d.sum()


def _random_stochastic(rng: np.random.Generator, n: int) -> np.ndarray:
    """Irreducible row-stochastic matrix with positive diagonal, not reversible in general."""
    a = rng.random((n, n)) * (rng.random((n, n)) < 0.5)
    perm = rng.permutation(n)
    a[perm, np.roll(perm, 1)] += 0.1 + rng.random(n)  # a random directed cycle
    a[np.diag_indices(n)] += 0.05 + rng.random(n)
    return a / a.sum(axis=1, keepdims=True)


def _identity_cases(
    name: str, cases: int, rng: np.random.Generator, fn: Callable[[np.random.Generator], float]
) -> Check:
    """Run ``fn`` on fresh random cases; fn returns a signed error (<= tol is a pass)."""
    tol = config.TOL.identity
    worst = -math.inf
    fails = 0
    for _ in range(cases):
        e = fn(rng)
        worst = max(worst, e)
        fails += e > tol
    return Check("identities", name, fails == 0, worst, tol, f"{fails} of {cases} cases failed")


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(a), abs(b))


def _green(rng):
    n = int(rng.integers(2, 11))
    P, pi = _random_reversible(rng, n)
    x = rng.normal(size=n)
    return _rel(sp.quadratic_form(P, pi, x), sp.green_sum(P, pi, x))


def _random_pi(rng, n):
    p = rng.random(n) + 0.01
    return p / p.sum()


def _variance(rng):
    n = int(rng.integers(2, 11))
    pi = _random_pi(rng, n)
    geo = sp.PiGeometry(pi)
    x = geo.project_out(rng.normal(size=n))
    rhs = 0.5 * float(np.sum(np.subtract.outer(x, x) ** 2 * np.outer(pi, pi)))
    return _rel(geo.norm(x) ** 2, rhs)


def _seminorm(rng):
    n = int(rng.integers(2, 11))
    pi = _random_pi(rng, n)
    geo = sp.PiGeometry(pi)
    x = geo.project_out(rng.normal(size=n))
    # signed: positive only when N(x) < sqrt(2) ||x||_pi
    return math.sqrt(2.0) * geo.norm(x) - sp.seminorm_N(x)


def _adjoint(rng):
    n = int(rng.integers(2, 11))
    A = _random_stochastic(rng, n)
    pi = mx.perron(A).entries
    adj = np.asarray(mx.adjoint(A, pi))
    back = np.asarray(mx.adjoint(adj, pi))
    stoch = np.abs(adj.sum(axis=1) - 1).max()
    neg = max(0.0, -adj.min())
    # pi is also the Perron vector of the adjoint
    fixed = np.abs(adj.T @ pi - pi).max()
    return max(np.abs(back - A).max(), stoch, neg, fixed)


def _reversible_square(rng):
    n = int(rng.integers(2, 11))
    P, pi = _random_reversible(rng, n)
    spec = sp.reversible_spectrum(P, pi)
    lam_gram = sp.reversible_spectrum(mx.gram(P, pi), pi).lambda2
    return abs(lam_gram - max(spec.lambda_n**2, spec.lambda2**2))


IDENTITIES = {
    "green_formula": _green,
    "variance_identity": _variance,
    "seminorm_vs_pi_norm": _seminorm,
    "adjoint_involution_stochastic": _adjoint,
    "reversible_square": _reversible_square,
}


def identities(seed: int = 0, cases: int = 10_000) -> list[Check]:
    out = []
    for k, (name, fn) in enumerate(IDENTITIES.items()):
        out.append(_identity_cases(name, cases, np.random.default_rng([seed, k]), fn))
    return out


# -- quadratic rules ---------------------------------------------------------------

QUADRATIC_SIZES = (8, 16, 32)


def quadratic(seed: int = 0, count: int = 50, T: int = 200, trials: int = 3) -> list[Check]:
    """Per-step variance contraction of (Lazy) Metropolis on random schedules.

    Limits are the squared quadratic rate bounds; each record also carries
    the per-run check against sup lambda_2(A^dag A).
    """
    rng = np.random.default_rng(seed)
    tol = config.TOL.contraction
    out = []
    for k in range(count):
        n = QUADRATIC_SIZES[k % len(QUADRATIC_SIZES)]
        sched = random_schedule(n, T, rng)
        for rule, limit in (
            ("metropolis", bounds.quadratic_metropolis_bound(n) ** 2),
            ("lazy_metropolis", bounds.quadratic_lazy_bound(n) ** 2),
        ):
            rep = sim.contraction_check(sched, rule, trials, seed=int(rng.integers(2**31)), T=T)
            ok = rep.worst_ratio <= limit + tol and rep.ok
            out.append(
                Check(
                    "quadratic",
                    f"schedule{k}-n{n}-{rule}",
                    ok,
                    rep.worst_ratio,
                    limit,
                    f"beta={rep.beta!r} violations={rep.violations}",
                )
            )
    return out


# -- slow examples ------------------------------------------------------------------

OT_SIZE = 12
OT_STEPS = 100_000


def ot_two_star(seed: int = 0, n: int = OT_SIZE, T: int = OT_STEPS) -> list[Check]:
    sched = sim.ot_two_star_schedule(n)
    rng = np.random.default_rng(seed)
    x0 = sim.random_x0(n, rng)
    slow = sim.empirical_rate(sim.simulate(sched, "equal_neighbor", x0, T, seed=seed))
    fast = sim.empirical_rate(sim.simulate(sched, "metropolis", x0, T, seed=seed))
    slow_limit = 1.0 - 2.0 ** (3 - n / 2)
    fast_limit = 1.0 - 1.0 / (4 * n * n)
    mats = [mx.build("equal_neighbor", g) for g in sched.graphs]
    centres_ok = others_ok = True
    for g, m in zip(sched.graphs, mats):
        pi = mx.perron(m).entries
        centres = [v for v in range(n) if g.degrees[v] > 2]
        centres_ok &= bool((pi[centres] > 1 / 6).all())
        others_ok &= bool((np.delete(pi, centres) > 2 / (3 * n)).all())
    return [
        Check("slow_examples", f"ot_two_star-{n}-equal_neighbor-rate", slow.rho_hat >= slow_limit,
              slow.rho_hat, slow_limit, "rho_hat >= limit"),
        Check("slow_examples", f"ot_two_star-{n}-metropolis-rate", fast.rho_hat <= fast_limit,
              fast.rho_hat, fast_limit, "rho_hat <= limit"),
        Check("slow_examples", f"ot_two_star-{n}-perron-centres", centres_ok, None, 1 / 6,
              "centre entries > 1/6"),
        Check("slow_examples", f"ot_two_star-{n}-perron-others", others_ok, None, 2 / (3 * n),
              "other entries > 2/(3n)"),
    ]


def barbell_en(p: int) -> list[Check]:
    g = make_family("barbell", p)
    N = mx.build("equal_neighbor", g)
    pi = mx.perron(N).entries
    lam2 = sp.reversible_spectrum(N, pi).lambda2
    scaled = (1.0 - lam2) * g.n**3
    v = barbell_positions(p)
    geo = sp.PiGeometry(pi)
    rayleigh = 1.0 - sp.quadratic_form(N, pi, v) / geo.norm(v) ** 2
    return [
        Check("slow_examples", f"barbell-{p}-cubic_gap", 1.0 <= scaled <= 80.0, scaled, 80.0,
              "(1 - lambda2) n^3 in [1, 80]"),
        Check("slow_examples", f"barbell-{p}-rayleigh", lam2 >= rayleigh - 1e-10, lam2, rayleigh,
              "lambda2 >= 1 - Q(v)/||v||^2"),
    ]


def butterfly_cut(m: int) -> Fraction:
    """Published value of the half-split cut of B^dag B."""
    return Fraction(1, 5 * 2 ** (m - 2))


def butterfly_en(m: int) -> list[Check]:
    g = make_family("butterfly", m)
    B = mx.build("equal_neighbor", g)
    pv = mx.perron(B)
    pi = pv.entries
    H = mx.gram(B, pi)
    lam2 = sp.reversible_spectrum(H, pi).lambda2
    ba = bounds.analytic_gram_bound(B, pi)
    met = bounds.graph_metrics(H.support)
    bb = bounds.beta_b(H, pi, met)
    bds = bounds.beta_ds(H, pi, met)
    best = min(ba, bb, bds)
    half = list(range(m))
    cut = sp.cut_value(H, pi, half)
    target = float(butterfly_cut(m))
    cheeger_gap = 2.0 * cut / pi[half].sum()
    return [
        Check("slow_examples", f"butterfly-{m}-perron_residual", pv.residual <= 1e-12,
              pv.residual, 1e-12),
        Check("slow_examples", f"butterfly-{m}-gram_bound", lam2 <= best + 1e-9, lam2, best,
              "lambda2(B^dag B) <= min(beta_a, beta_b, beta_ds)"),
        Check("slow_examples", f"butterfly-{m}-cheeger_gap", 1.0 - lam2 <= cheeger_gap + 1e-12,
              1.0 - lam2, cheeger_gap, "1 - lambda2 <= 2 cut(S)/pi(S)"),
        Check("slow_examples", f"butterfly-{m}-cut_value", abs(cut - target) <= 1e-12,
              cut, target, "half-split cut equals 1/(5 2^(m-2))"),
    ]


def butterfly_alpha_ratios(ms=range(3, 8)) -> list[Check]:
    al = [mx.alpha(mx.build("equal_neighbor", make_family("butterfly", m))) for m in ms]
    out = []
    for m, a0, a1 in zip(list(ms)[1:], al, al[1:]):
        r = a1 / a0
        out.append(Check("slow_examples", f"butterfly-{m}-alpha_ratio", abs(r - 0.5) <= 1e-9, r, 0.5))
    return out


def slow_examples(seed: int = 0) -> list[Check]:
    out = ot_two_star(seed)
    for p in range(3, 9):
        out += barbell_en(p)
    for m in range(3, 8):
        out += butterfly_en(m)
    return out + butterfly_alpha_ratios()


SUITES: dict[str, Callable[..., list[Check]]] = {
    "soundness": soundness,
    "identities": identities,
    "quadratic": quadratic,
    "slow_examples": slow_examples,
}
