
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gibbslab import hamiltonian as ham
from gibbslab import separability as sep
from gibbslab.hamiltonian import LocalHamiltonian
from gibbslab.qop import op_norm, pauli_string


def test_chain3_cluster_counts_from_the_middle():
    H = ham.chain(3)
    assert sep.cluster_counts(H, 1, 4) == [2, 4, 8, 16]
    for k in range(1, 5):
        assert len(sep.enumerate_clusters_brute_force(H, 1, k)) == 2**k


def test_cluster_enumerators_agree_on_hypergraph():
    H = LocalHamiltonian.build(
        5, [((0, 1, 2), pauli_string("XYZ")), ((2, 3), pauli_string("ZZ")), ((3, 4), pauli_string("XX"))]
    )
    for origin in range(5):
        dp = sep.cluster_counts(H, origin, 4)
        for k in range(1, 5):
            brute = sep.enumerate_clusters_brute_force(H, origin, k)
            assert sorted(sep.enumerate_clusters(H, origin, k)) == sorted(brute)
            assert dp[k - 1] == len(brute) <= sep.cluster_count_cap(k, H.degree, H.locality)


@pytest.mark.parametrize("L", [1, 2, 3])
def test_akt_recurrence_matches_definition(L):
    for t in range(9):
        for k in range(t + 2):
            assert sep.akt(k, t, L) == sep.akt_brute_force(k, t, L)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.integers(1, 4), st.floats(0.01, 1.0))
def test_combo_identity(L, k, frac):
    assert sep.combo_identity_check(frac / L, L, k) < 1e-9


def test_coefficient_bound_values():
    assert sep.cluster_coeff_bound(1, 0.01, 10, 2) == pytest.approx(0.0612770, abs=5e-8)
    assert sep.cluster_coeff_bound(3, 0.01, 0.0, 2) == pytest.approx(0.04**3 / 6)
    # no overflow for huge k
    assert sep.cluster_coeff_bound(400, 1e-3, 1.0, 2) == 0.0 or sep.cluster_coeff_bound(400, 1e-3, 1.0, 2) < 1e-300


def test_regime_predicates_differ():
    D, L = 2, 2
    beta = 1 / (4 * D * L * 56**L)
    assert sep.araki_regime(beta, 0.0, D, L)
    assert not sep.separability_regime(beta, 0.0, D, L)
    assert not sep.geometric_cluster_regime(beta, 0.0, D, L)
    h_max = sep.field_window(beta, D, L)
    assert sep.araki_regime(beta, h_max, D, L)
    assert not sep.araki_regime(beta, h_max * 1.001, D, L)


def test_araki_deviation_below_bound():
    H = LocalHamiltonian.build(3, [((0, 1), pauli_string("XX")), ((1, 2), pauli_string("ZZ"))], ham.z_field(200.0, 3))
    rep = sep.araki_check(H, 1e-4, 1)
    assert rep.passed
    assert rep.deviation > 0


def test_araki_without_interaction_at_origin():
    H = LocalHamiltonian.build(3, [((1, 2), pauli_string("ZZ"))], ham.z_field(3.0, 3))
    X = sep.araki_expansional(H, 0.1, 0)
    assert op_norm(X - np.eye(8)) < 1e-13


def test_araki_matches_direct_product_for_moderate_beta():
    import scipy.linalg

    H = ham.chain(3, ("XX",), h=1.0)
    beta = 0.3
    X = sep.araki_expansional(H, beta, 0)
    ref = scipy.linalg.expm(-beta * H.dense) @ scipy.linalg.expm(beta * H.without_terms_at(0).dense)
    assert np.abs(X - ref).max() < 1e-12
