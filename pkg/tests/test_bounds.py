import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from consensus_spectra import bounds
from consensus_spectra import matrices as mx
from consensus_spectra.graphs import GraphSchedule, PathFamily, make_family, random_connected_graph
from consensus_spectra.verify import _random_stochastic

from conftest import oracle_eigs


def test_kappa_on_hand_built_family():
    # 3-ring under Metropolis: every off-diagonal entry is 1/3, pi uniform
    P = mx.metropolis(make_family("ring", 3))
    pi = np.full(3, 1 / 3)
    direct = {(i, j): ((i, j),) for i in range(3) for j in range(3) if i != j}
    fam = PathFamily(3, direct, edge_disjoint=True, geodesic=True)
    # |gamma|_P = 1/(1/3 * 1/3) = 9
    assert bounds.kappa(P, pi, fam) == pytest.approx(9.0)
    # each edge carries one path: 9 * 1/9
    assert bounds.kappa_tilde(P, pi, fam) == pytest.approx(1.0)
    both = {(i, j): ((i, j), (i, 3 - i - j, j)) for i, j in direct}
    fam2 = PathFamily(3, both, edge_disjoint=True, geodesic=False)
    assert bounds.kappa(P, pi, fam2) == pytest.approx(1 / (1 / 9 + 1 / 18))
    with pytest.raises(mx.MatrixError, match="one path"):
        bounds.kappa_tilde(P, pi, fam2)


def test_ring21_ds_beats_b():
    rep = bounds.full_report(make_family("ring", 21), "equal_neighbor")
    assert rep.beta_ds < rep.beta_b < 1


def test_star_b_beats_ds():
    rep = bounds.full_report(make_family("star", 50), "equal_neighbor")
    assert 1 - rep.beta_b > 5 * (1 - rep.beta_ds)


def test_hypercube_metropolis_ds_beats_b():
    rep = bounds.full_report(make_family("hypercube", 5), "metropolis")
    assert 1 - rep.beta_ds > 5 * (1 - rep.beta_b)


def test_report_on_non_reversible_input():
    rep = bounds.full_report(make_family("butterfly", 5), "equal_neighbor")
    assert not rep.reversible
    assert rep.all_sound
    assert rep.beta_a is not None and rep.cheeger_lower is not None


def test_report_absent_reasons_for_large_n():
    rep = bounds.full_report(make_family("ring", 25), "metropolis")
    assert rep.eta_bound is None
    assert "n <= 22" in rep.absent["eta_bound"]
    assert rep.all_sound


def test_report_csv_columns():
    text = bounds.reports_to_csv([bounds.full_report(make_family("star", 6), "metropolis")])
    header, row = text.strip().split("\n")
    assert header.split(",") == list(bounds.CSV_COLUMNS)
    assert row.startswith("star-6,metropolis,6,")
    assert "np." not in row


@settings(max_examples=60, deadline=None)
@given(n=st.integers(3, 12), seed=st.integers(0, 2**32 - 1))
def test_gram_chain_analytic_bound(n, seed):
    A = _random_stochastic(np.random.default_rng(seed), n)
    pi = mx.perron(A).entries
    G = mx.gram(A, pi)
    lam2 = oracle_eigs(G.entries, pi)[1]
    assert lam2 <= bounds.analytic_gram_bound(A, pi) + 1e-9


@settings(max_examples=30, deadline=None)
@given(n=st.integers(4, 12), seed=st.integers(0, 2**32 - 1))
def test_corollaries_weaken_propositions(n, seed):
    rep = bounds.full_report(random_connected_graph(n, np.random.default_rng(seed)), "metropolis")
    assert rep.beta_b >= rep.kappa_bound - 1e-12
    assert rep.beta_ds >= rep.kappa_tilde_bound - 1e-12


def test_quadratic_closed_forms():
    assert bounds.quadratic_metropolis_bound(4) == 1 - 1 / 64
    assert bounds.quadratic_lazy_bound(4) == 1 - 1 / 128
    with pytest.raises(ValueError):
        bounds.quadratic_en_bound(5, 4, 3)


def test_metropolis_quadratic_bound_dominates_corollary():
    for fam, size in [("ring", 15), ("barbell", 4), ("star", 12)]:
        g = make_family(fam, size)
        rb = bounds.reversible_rate_bound(GraphSchedule.constant(g), "metropolis")
        assert rb.value <= bounds.quadratic_metropolis_bound(g.n) + 1e-12


def test_rate_bound_assumption_errors():
    g = make_family("star", 6)
    moving = GraphSchedule.periodic([g, g.relabel([1, 0, 2, 3, 4, 5])])
    with pytest.raises(mx.AssumptionError, match="A3 fails at step 2"):
        bounds.reversible_rate_bound(moving, "equal_neighbor")
    with pytest.raises(mx.AssumptionError, match="A4 fails at step 1"):
        bounds.reversible_rate_bound(GraphSchedule.constant(make_family("butterfly", 4)), "equal_neighbor")


def test_small_variation_reduces_to_constant_case():
    g = make_family("ring", 9)
    s = GraphSchedule.periodic([g, g.relabel([2, 0, 1, 5, 3, 4, 8, 6, 7])])
    sv = bounds.small_variation_rate_bound(s, "metropolis")
    assert sv.nu == 1.0
    assert sv.value == pytest.approx(bounds.reversible_rate_bound(s, "metropolis").theorem)


def test_small_variation_vacuous_on_moving_centres():
    from consensus_spectra.sim import ot_two_star_schedule

    sv = bounds.small_variation_rate_bound(ot_two_star_schedule(8), "equal_neighbor")
    assert sv.nu > 1
    assert sv.vacuous


def test_corollary_rate_is_relabel_invariant():
    g = make_family("grid", 4)
    perm = np.random.default_rng(1).permutation(16).tolist()
    assert bounds.corollary_rate_bound(g.relabel(perm), "metropolis") == pytest.approx(
        bounds.corollary_rate_bound(g, "metropolis")
    )
