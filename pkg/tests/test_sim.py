import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from consensus_spectra import matrices as mx
from consensus_spectra import sim
from consensus_spectra.graphs import GraphError, GraphSchedule, make_family, random_schedule

from conftest import oracle_eigs


def _eigvec2(P, pi):
    r = np.sqrt(pi)
    s = r[:, None] * P / r[None, :]
    _, vecs = np.linalg.eigh(0.5 * (s + s.T))
    return vecs[:, -2] / r


def test_constant_start_is_fixed():
    s = GraphSchedule.constant(make_family("ring", 7))
    tr = sim.simulate(s, "equal_neighbor", np.full(7, 2.5), 50)
    assert np.all(tr.x_final == 2.5)
    assert tr.V[0] <= 1e-28
    est = sim.empirical_rate(tr)
    assert est.converged and est.rho_hat == 0.0


def test_eigenvector_start_decays_at_lambda2():
    g = make_family("barbell", 3)
    P = mx.equal_neighbor(g).entries
    pi = mx.perron(P).entries
    lam2 = oracle_eigs(P, pi)[1]
    tr = sim.simulate(GraphSchedule.constant(g), "equal_neighbor", _eigvec2(P, pi), 300)
    assert sim.empirical_rate(tr).rho_hat == pytest.approx(lam2, abs=1e-6)
    ratio = tr.V[1:50] / tr.V[:49]
    assert np.allclose(ratio, lam2**2, rtol=1e-9)


@settings(max_examples=20, deadline=None)
@given(n=st.integers(3, 12), seed=st.integers(0, 2**32 - 1))
def test_monotone_and_conserved_under_metropolis(n, seed):
    rng = np.random.default_rng(seed)
    s = random_schedule(n, 40, rng)
    x0 = sim.random_x0(n, rng) + 0.3
    tr = sim.simulate(s, "metropolis", x0, 40)
    assert np.all(np.diff(tr.N) <= 1e-15)
    assert np.all(np.diff(tr.V) <= 1e-15)
    assert tr.perron_constant
    assert np.abs(tr.pi_mean - tr.pi_mean[0]).max() <= 1e-10 * np.linalg.norm(x0)
    assert tr.consensus_value == pytest.approx(x0.mean())


def test_seminorm_monotone_without_constant_perron():
    s = sim.ot_two_star_schedule(10)
    tr = sim.simulate(s, "equal_neighbor", sim.random_x0(10, np.random.default_rng(3)), 200)
    assert not tr.perron_constant and tr.consensus_value is None
    assert np.all(np.diff(tr.N) <= 1e-15)


def test_simulate_argument_checks():
    s = GraphSchedule.sequence([make_family("ring", 5)] * 3)
    with pytest.raises(GraphError, match="only defines 3"):
        sim.simulate(s, "metropolis", np.zeros(5), 4)
    with pytest.raises(ValueError, match="length 5"):
        sim.simulate(s, "metropolis", np.zeros(4), 2)
    with pytest.raises(ValueError):
        sim.simulate(s, "metropolis", np.zeros(5), 0)


def test_ot_schedule_structure():
    s = sim.ot_two_star_schedule(8)
    assert s.period == 4
    for g in s.graphs:
        assert g.is_bidirectional() and g.is_strongly_connected()
        assert sorted(g.degrees.tolist()) == [2] * 6 + [5, 5]
    with pytest.raises(GraphError):
        sim.ot_two_star_schedule(9)


def test_ot_perron_entries():
    n = 12
    for g in sim.ot_two_star_schedule(n).graphs:
        pi = mx.perron(mx.equal_neighbor(g)).entries
        centres = g.degrees > 2
        assert (pi[centres] > 1 / 6).all()
        assert (pi[~centres] > 2 / (3 * n)).all()


def test_contraction_check_on_constant_ring():
    s = GraphSchedule.constant(make_family("ring", 9), horizon=100)
    rep = sim.contraction_check(s, "equal_neighbor", trials=3, seed=1)
    P = mx.equal_neighbor(make_family("ring", 9)).entries
    ev = oracle_eigs(P, np.full(9, 1 / 9))
    assert rep.ok
    assert rep.beta == pytest.approx(max(ev[1] ** 2, ev[-1] ** 2), abs=1e-12)
    assert rep.worst_ratio <= rep.beta + 1e-12


def test_contraction_check_requires_constant_perron():
    with pytest.raises(mx.AssumptionError, match="A3"):
        sim.contraction_check(sim.ot_two_star_schedule(8), "equal_neighbor")


def test_trajectory_dump(tmp_path):
    s = GraphSchedule.constant(make_family("star", 6))
    tr = sim.simulate(s, "metropolis", sim.random_x0(6, np.random.default_rng(0)), 30, seed=0)
    tr.dump(tmp_path / "run")
    lines = (tmp_path / "run.csv").read_text().splitlines()
    assert lines[0] == "t,V,N" and len(lines) == 32
    head = json.loads((tmp_path / "run.json").read_text())
    assert head["seed"] == 0 and head["rule"] == "metropolis" and "rho_hat" in head


def test_empirical_rate_window():
    with pytest.raises(ValueError):
        sim.empirical_rate(None, window=0)
