import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from consensus_spectra import matrices as mx
from consensus_spectra import spectral as sp
from consensus_spectra.graphs import make_family, random_connected_graph

from conftest import oracle_cuts, oracle_eigs


def test_ring5_second_eigenvalue():
    # EqualNeighbor on the 5-ring is (I + S + S^-1)/3: lambda_2 = (1 + 2 cos(2 pi / 5))/3
    P = mx.equal_neighbor(make_family("ring", 5))
    assert sp.reversible_spectrum(P).lambda2 == pytest.approx((1 + 2 * math.cos(2 * math.pi / 5)) / 3, abs=1e-14)


@settings(max_examples=60, deadline=None)
@given(
    n=st.integers(2, 16),
    seed=st.integers(0, 2**32 - 1),
    rule=st.sampled_from(["metropolis", "lazy_metropolis", "equal_neighbor"]),
)
def test_jacobi_matches_lapack(n, seed, rule):
    P = mx.build(rule, random_connected_graph(n, np.random.default_rng(seed)))
    pi = mx.perron(P).entries
    spec = sp.reversible_spectrum(P, pi)
    assert spec.offdiag <= 1e-12
    assert np.allclose(spec.eigenvalues, oracle_eigs(P.entries, pi), atol=1e-12)
    assert spec.eigenvalues[0] == pytest.approx(1.0, abs=1e-12)


def test_jacobi_on_large_tree_converges_within_cap():
    P = mx.equal_neighbor(make_family("binary_tree", 6))
    spec = sp.reversible_spectrum(P)
    assert spec.sweeps <= 30
    assert spec.lambda2 == pytest.approx(oracle_eigs(P.entries, mx.perron(P).entries)[1], abs=1e-12)


def test_spectrum_json_fields():
    import json

    d = json.loads(sp.reversible_spectrum(mx.metropolis(make_family("ring", 5))).to_json())
    assert d["method"] == "jacobi" and len(d["eigenvalues"]) == 5


def test_non_reversible_input_is_refused():
    B = mx.equal_neighbor(make_family("butterfly", 4))
    with pytest.raises(mx.MatrixError, match="gram"):
        sp.reversible_spectrum(B)


def test_second_singular_of_reversible_is_max_abs_eigenvalue():
    P = mx.equal_neighbor(make_family("barbell", 3))
    pi = mx.perron(P).entries
    ev = oracle_eigs(P.entries, pi)
    assert sp.second_singular(P, pi) == pytest.approx(max(abs(ev[1]), abs(ev[-1])), abs=1e-12)


def test_gershgorin_floor():
    P = mx.lazy_metropolis(make_family("star", 8))
    assert sp.gershgorin_floor(P) >= 0.0
    assert oracle_eigs(P.entries, mx.perron(P).entries)[-1] >= sp.gershgorin_floor(P) - 1e-12


@settings(max_examples=40, deadline=None)
@given(n=st.integers(2, 9), seed=st.integers(0, 2**32 - 1))
def test_cut_constants_match_bruteforce(n, seed):
    P = mx.equal_neighbor(random_connected_graph(n, np.random.default_rng(seed)))
    pi = mx.perron(P).entries
    cc = sp.cut_constants(P, pi)
    mu, h = oracle_cuts(P.entries, pi)
    assert cc.mu == pytest.approx(mu, abs=1e-14)
    assert cc.h == pytest.approx(h, abs=1e-14)
    assert cc.mu <= cc.h / 2 + 1e-15
    assert sp.cut_value(P, pi, cc.mu_subset) == pytest.approx(cc.mu, abs=1e-14)
    lo, hi = cc.cheeger_bracket
    lam2 = oracle_eigs(P.entries, pi)[1]
    assert lo - 1e-12 <= lam2 <= hi + 1e-12


def test_cut_enumeration_size_limit():
    P = mx.metropolis(make_family("ring", 23))
    with pytest.raises(sp.SizeError, match="analytic"):
        sp.mu(P)


def test_pi_geometry():
    geo = sp.PiGeometry(np.array([0.5, 0.25, 0.25]))
    x = np.array([1.0, -1.0, 3.0])
    y = geo.project_out(x)
    assert geo.mean(y) == pytest.approx(0.0, abs=1e-15)
    assert geo.norm(np.ones(3)) == pytest.approx(1.0)
    with pytest.raises(mx.MatrixError):
        sp.PiGeometry(np.array([1.0, 0.0]))


@settings(max_examples=50, deadline=None)
@given(n=st.integers(3, 12), seed=st.integers(0, 2**32 - 1))
def test_green_formula_on_rules(n, seed):
    rng = np.random.default_rng(seed)
    P = mx.equal_neighbor(random_connected_graph(n, rng))
    pi = mx.perron(P).entries
    x = rng.normal(size=n)
    assert sp.quadratic_form(P, pi, x) == pytest.approx(sp.green_sum(P, pi, x), rel=1e-10, abs=1e-12)


def test_seminorm():
    assert sp.seminorm_N([3.0, -1.0, 2.0]) == 4.0
    with pytest.raises(ValueError):
        sp.seminorm_N([])
