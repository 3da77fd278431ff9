import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gibbslab import dobrushin as db
from gibbslab import hamiltonian as ham
from gibbslab import lindbladian as lb
from gibbslab.hamiltonian import LocalHamiltonian
from gibbslab.kernels import SiteKernelParams
from gibbslab.qop import PAULI, random_hermitian
from gibbslab.report import make_rng


def test_constants():
    assert db.C_DIAG == pytest.approx(0.5506953149, abs=1e-10)
    assert db.DELTA_MAX == pytest.approx(1 / (3 * math.sqrt(2)))


@pytest.mark.parametrize("bh", np.logspace(-3, 5, 9))
def test_b_overlap_floor_and_quadrature(bh):
    beta = 0.1
    h = bh / beta
    p = SiteKernelParams.resonant(beta, h)
    ov = db.overlap_integrals(h, p)
    q = db.overlap_integrals_by_quadrature(h, p)
    assert ov.b2 >= db.C_DIAG - 1e-15
    assert max(abs(ov.a2 - q.a2), abs(ov.b2 - q.b2), abs(ov.c2 - q.c2)) < 1e-9


def test_b_overlap_floor_attained_at_small_field():
    # h -> 0 with Delta = 1/beta gives exactly e^{-1/4}/sqrt 2
    ov = db.overlap_integrals_resonant(0.0, 0.3)
    assert ov.b2 == pytest.approx(db.C_DIAG, rel=1e-15)


def test_canonical_negative_control_value():
    ov = db.overlap_integrals_canonical(10 / 0.1, 0.1)
    assert ov.b2 == pytest.approx(math.exp(-81 / 4) / math.sqrt(2), rel=1e-12)
    assert ov.b2 < 1.2e-9


def test_rotate_field_to_z():
    V = random_hermitian(2, make_rng(1), scale=3.0)
    h, U = db.rotate_field_to_z(V)
    expect = h / 2 * PAULI["Z"] + np.trace(V) / 2 * np.eye(2)
    assert np.abs(U @ V @ U.conj().T - expect).max() < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.floats(-2, 6), st.floats(0, 1))
def test_channel_contracts(seed, m, log_bh, frac):
    rng = make_rng(seed)
    beta = 0.2
    h = 10**log_bh / beta
    delta = frac * db.DELTA_MAX
    X = np.zeros((2**m, 2**m), dtype=complex)
    for P in "XYZ":
        X += np.kron(PAULI[P], random_hermitian(2 ** (m - 1), rng))
    res = db.local_dissipative_contraction(h, beta, delta, X)
    assert res.passed


def test_contraction_input_validation():
    with pytest.raises(ValueError):
        db.local_dissipative_contraction(1.0, 0.1, 0.5, PAULI["X"])
    with pytest.raises(ValueError):
        db.local_dissipative_contraction(1.0, 0.1, 0.1, np.eye(2))


def test_channel_agrees_with_generator_restricted_to_field():
    b, h = 0.2, 12.0
    H = LocalHamiltonian.build(2, [], [h / 2 * PAULI["Z"], 0.3 * PAULI["X"]])
    gen = lb.dissipator(H, b, sites=[0]).matrix
    closed = db.local_channel(h, SiteKernelParams.resonant(b, h), 1.0, 2).matrix - np.eye(16)
    assert np.abs(gen - closed).max() < 1e-12


@settings(max_examples=50, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
def test_pauli_decomposition(cx, cy, cz):
    d = db.pauli_norm_decomposition(cx, cy, cz)
    assert np.allclose(d.coefficients(), (cx, cy, cz), atol=1e-12)
    if min(cx, cy, cz) >= 0:
        assert d.l1 == pytest.approx(max(cx, cy, cz), abs=1e-12)


def test_closed_form_bounds():
    assert db.mixing_time_bound(4, 0.01) == 14
    assert db.c_offdiag(2, 0.01, 2, 2) == pytest.approx(120 * 0.24**2)
    assert db.c_const(1.0, 1.0) == pytest.approx(144 + 324 * (math.log(2) + 4) ** 2)
    assert db.mixing_regime(1 / (28800 * 64), 2, 2)
    assert not db.mixing_regime(1e-3, 2, 2)
    with pytest.raises(ValueError):
        db.dobrushin_column_bound(4, 1e-6, 2, 2, 1e6, 0.2)
    with pytest.raises(ValueError):
        db.mixing_time_bound(4, 1.5)


def test_influence_matrix_shape_and_diagonal():
    H = ham.chain(4, h=3.0)
    M = db.influence_matrix_bound(H, 1 / (28800 * 64), 1e-5)
    assert M.shape == (4, 4)
    assert (M >= 0).all()
    assert np.all(np.diag(M) < 1)


def test_influence_columns_within_dobrushin_bound():
    H = ham.chain(4, h=3.0)
    D, L = H.degree, H.locality
    beta = 1 / (28800 * (D * L) ** 3)
    delta = 1e-5
    M = db.influence_matrix_bound(H, beta, delta)
    Delta_max = max(1 / beta, 3.0)
    bound = db.dobrushin_column_bound(H.n, beta, D, L, Delta_max, delta)
    assert (M.mean(axis=0) <= bound).all()
    assert bound < 1
