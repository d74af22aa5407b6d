import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from consensus_spectra import matrices as mx
from consensus_spectra.graphs import GraphSchedule, make_family, random_connected_graph
from consensus_spectra.graphs.core import DirectedGraph

from conftest import oracle_perron

RULES = ("metropolis", "lazy_metropolis", "equal_neighbor", "fixed_weight")


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 14), seed=st.integers(0, 2**32 - 1), rule=st.sampled_from(RULES))
def test_builders_are_stochastic_on_reversed_support(n, seed, rule):
    g = random_connected_graph(n, np.random.default_rng(seed))
    m = mx.build(rule, g)
    a = m.entries
    assert np.abs(a.sum(axis=1) - 1).max() <= 1e-12
    assert (a >= 0).all()
    assert (np.diag(a) > 0).all()
    assert m.support == g.reverse()


def test_metropolis_is_symmetric_lazy_has_half_diagonal():
    g = make_family("barbell", 3)
    M = mx.metropolis(g).entries
    L = mx.lazy_metropolis(g).entries
    assert np.array_equal(M, M.T)
    assert np.array_equal(L, L.T)
    assert np.diag(L).min() >= 0.5


def test_metropolis_needs_bidirectional():
    with pytest.raises(mx.MatrixError, match="bidirectional"):
        mx.metropolis(make_family("butterfly", 4))


def test_equal_neighbor_perron_is_degree_proportional():
    g = make_family("star", 7)
    pi = mx.perron(mx.equal_neighbor(g)).entries
    d = g.degrees
    assert np.allclose(pi, d / d.sum(), atol=1e-15)


def test_fixed_weight_rejects_small_q():
    g = make_family("star", 6)
    with pytest.raises(mx.MatrixError, match="node 0"):
        mx.fixed_weight(g, 3)
    P = mx.fixed_weight(g, 6).entries
    assert P[1, 0] == pytest.approx(1 / 6)
    assert P[1, 1] == pytest.approx(5 / 6)


def test_unknown_rule():
    with pytest.raises(mx.MatrixError, match="unknown rule"):
        mx.build("gossip", make_family("ring", 5))


def test_rejects_bad_matrices():
    with pytest.raises(mx.MatrixError, match="row sums"):
        mx.StochasticMatrix(np.array([[0.5, 0.4], [0.5, 0.5]]))
    with pytest.raises(mx.MatrixError, match="nonnegative"):
        mx.StochasticMatrix(np.array([[1.5, -0.5], [0.5, 0.5]]))
    with pytest.raises(mx.MatrixError, match="square"):
        mx.StochasticMatrix(np.ones((2, 3)) / 3)


def test_perron_matches_dense_eigensolver_and_power_iteration():
    for fam, size in [("butterfly", 5), ("barbell", 3), ("two_star", 10)]:
        P = mx.equal_neighbor(make_family(fam, size))
        pv = mx.perron(P)
        assert pv.residual <= 1e-12
        assert np.allclose(pv.entries, oracle_perron(P.entries), atol=1e-12)
        assert np.allclose(pv.entries, mx.power_iteration_perron(P), atol=1e-10)


def test_butterfly_perron_closed_form():
    # centres carry 1/5, inner nodes 3/(5 2^i); the last node repeats the one before it
    m = 6
    pi = mx.perron(mx.equal_neighbor(make_family("butterfly", m))).entries
    assert pi[0] == pytest.approx(1 / 5, abs=1e-14)
    for i in range(2, m):
        assert pi[i - 1] == pytest.approx(3 / (5 * 2**i), abs=1e-14)
    assert pi[m - 1] == pytest.approx(pi[m - 2], abs=1e-14)
    assert np.allclose(pi, pi[::-1], atol=1e-14)


def test_reducible_matrix():
    with pytest.raises(mx.IrreducibleError):
        mx.perron(np.eye(3))


def test_adjoint_and_gram(rng):
    A = mx.equal_neighbor(make_family("butterfly", 4))
    pi = mx.perron(A).entries
    adj = mx.adjoint(A, pi)
    assert isinstance(adj, mx.StochasticMatrix)
    assert np.allclose(np.asarray(mx.adjoint(adj, pi)), A.entries, atol=1e-14)
    G = mx.gram(A, pi)
    assert mx.is_reversible(G, 1e-12, pi)
    assert not mx.is_reversible(A, 1e-10, pi)
    # with a foreign pi the adjoint is no longer stochastic
    assert not isinstance(mx.adjoint(A, np.full(8, 1 / 8)), mx.StochasticMatrix)


def test_alpha_excludes_diagonal():
    P = mx.metropolis(make_family("ring", 5))
    assert mx.alpha(P) == pytest.approx(1 / 15)
    with pytest.raises(mx.MatrixError):
        mx.alpha(np.eye(2))


def test_json_roundtrip_is_exact(rng):
    P = mx.equal_neighbor(random_connected_graph(9, rng))
    back = mx.StochasticMatrix.from_json(P.to_json())
    assert np.array_equal(back.entries, P.entries)
    d = json.loads(P.to_json())
    assert d["n"] == 9 and d["rule"] == "equal_neighbor"


def test_schedule_infima_constant_perron():
    g = make_family("ring", 7)
    s = GraphSchedule.periodic([g, g.relabel([3, 1, 4, 0, 6, 5, 2])])
    inf = mx.schedule_infima(s, "metropolis")
    assert inf.perron_constant and inf.nu == 1.0
    assert inf.a == pytest.approx(1 / 3)


def test_schedule_infima_detects_changing_perron():
    g = make_family("star", 6)
    s = GraphSchedule.periodic([g, g.relabel([1, 0, 2, 3, 4, 5])])
    inf = mx.schedule_infima(s, "equal_neighbor")
    assert not inf.perron_constant
    # a leaf's 2/16 becomes the centre's 6/16 and back
    assert inf.nu == pytest.approx(np.sqrt(3))


def test_schedule_with_disconnected_step():
    g = make_family("ring", 5)
    broken = DirectedGraph.from_undirected(5, [(0, 1), (2, 3), (3, 4)])
    with pytest.raises(mx.AssumptionError, match="A1 fails at step 2"):
        mx.schedule_matrices(GraphSchedule.sequence([g, broken]), "metropolis")
