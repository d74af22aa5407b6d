import itertools

import networkx as nx
import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def oracle_eigs(P, pi):
    """Eigenvalues of a reversible P, descending, via LAPACK on the symmetrization."""
    r = np.sqrt(pi)
    s = r[:, None] * np.asarray(P) / r[None, :]
    return np.sort(np.linalg.eigvalsh(0.5 * (s + s.T)))[::-1]


def oracle_lambda2(P, pi):
    return oracle_eigs(P, pi)[1]


def oracle_perron(P):
    """Left eigenvector for the eigenvalue closest to 1, via a dense eigensolver."""
    vals, vecs = np.linalg.eig(np.asarray(P).T)
    v = np.real(vecs[:, np.argmin(np.abs(vals - 1))])
    return v / v.sum()


def oracle_cuts(P, pi):
    """(mu, h) by enumerating subsets with itertools."""
    P = np.asarray(P)
    n = len(pi)
    mu = h = np.inf
    for k in range(1, n):
        for S in itertools.combinations(range(n), k):
            inside = np.zeros(n, bool)
            inside[list(S)] = True
            cut = float((pi[inside, None] * P[np.ix_(inside, ~inside)]).sum())
            mu = min(mu, cut)
            mass = pi[inside].sum()
            if mass <= 0.5 + 1e-12:
                h = min(h, cut / mass)
    return mu, h


def to_nx(g):
    """networkx DiGraph without self-loops."""
    d = nx.DiGraph()
    d.add_nodes_from(range(g.n))
    d.add_edges_from((i, j) for i, j in g.edges if i != j)
    return d


# -- acceptance summary ---------------------------------------------------------

ACCEPTANCE: dict[int, list[tuple[bool, str]]] = {}
CRITERIA = {
    1: "soundness of every bound on 200 random graphs x 3 rules",
    2: "family metrics match the stated closed forms",
    3: "rate-bound gaps within 25% of the published leading order (n >= 64)",
    4: "per-step contraction of (Lazy) Metropolis on random schedules",
    5: "barbell EqualNeighbor cubic gap and Rayleigh inequality",
    6: "butterfly Perron, alpha, gram bounds and half-split cut",
    7: "identity suite, 10^4 cases each",
    8: "OT two-star slow vs Metropolis fast",
    9: "asymptotic statements handled only through criterion 3",
}


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE.setdefault(criterion, []).append((bool(ok), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for c in sorted(ACCEPTANCE):
        items = ACCEPTANCE[c]
        ok = all(flag for flag, _ in items)
        passed = sum(flag for flag, _ in items)
        tr.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {c}: {CRITERIA[c]} ({passed}/{len(items)} checks)")
        for flag, detail in items:
            if not flag:
                tr.write_line(f"        fail: {detail}")
