
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gibbslab.qop import (
    PAULI, DimensionError, Superoperator, dagger, expm_hermitian, gibbs_state, herm_eig,
    induced_1norm_lower, num_qubits, op_norm, partial_trace, pauli_string, random_density_matrix,
    random_hermitian, tensor_embed, trace_norm, unvec, vec,
)
from gibbslab.report import make_rng


def test_pauli_algebra():
    X, Y, Z = PAULI["X"], PAULI["Y"], PAULI["Z"]
    assert np.abs(X @ Y - 1j * Z).max() < 1e-15
    assert np.abs(pauli_string("XZ") - np.kron(X, Z)).max() == 0
    with pytest.raises(ValueError):
        pauli_string("XQ")


def test_num_qubits_rejects_non_power_of_two():
    assert num_qubits(8) == 3
    with pytest.raises(DimensionError):
        num_qubits(6)


def test_tensor_embed_site_zero_is_leftmost():
    A = random_hermitian(2, make_rng(1))
    assert np.abs(tensor_embed(A, [0], 3) - np.kron(A, np.eye(4))).max() < 1e-15
    B = random_hermitian(4, make_rng(2))
    # reversed support swaps the factors
    swap = np.eye(4)[[0, 2, 1, 3]]
    assert np.abs(tensor_embed(B, [1, 0], 2) - swap @ B @ swap).max() < 1e-14


def test_partial_trace_of_product():
    rng = make_rng(3)
    A, B, C = (random_density_matrix(2, rng) for _ in range(3))
    X = np.kron(np.kron(A, B), C)
    assert np.abs(partial_trace(X, [1], 3) - np.kron(A, C)).max() < 1e-14
    assert np.abs(partial_trace(X, [0, 2], 3) - B).max() < 1e-14


def test_partial_trace_cyclicity():
    rng = make_rng(4)
    X = random_hermitian(8, rng)
    Y = random_hermitian(4, rng)
    IY = tensor_embed(Y, [1, 2], 3)
    lhs = partial_trace(IY @ X, [1, 2], 3)
    rhs = partial_trace(X @ IY, [1, 2], 3)
    assert np.abs(lhs - rhs).max() < 1e-10


def test_vec_column_stacking():
    rng = make_rng(5)
    A, X, B = (random_hermitian(4, rng) + 1j * random_hermitian(4, rng) for _ in range(3))
    assert np.abs(np.kron(B.T, A) @ vec(X) - vec(A @ X @ B)).max() < 1e-12
    assert np.abs(unvec(vec(X)) - X).max() == 0


def test_gibbs_state_huge_field_is_finite():
    H = np.diag([0.0, 1e6, 2e6, 3e6])
    sigma = gibbs_state(H, 0.1)
    assert np.isfinite(sigma).all()
    assert abs(np.trace(sigma) - 1) < 1e-15
    assert sigma[0, 0] == 1.0


def test_herm_eig_groups_degenerate_levels():
    data = herm_eig(np.diag([1.0, 1.0 + 1e-12, 2.0, 3.0]))
    assert len(data.levels) == 3
    P = data.projectors
    assert np.abs(sum(P) - np.eye(4)).max() < 1e-14


def test_superoperator_helpers():
    rng = make_rng(6)
    A = random_hermitian(2, rng) + 1j * random_hermitian(2, rng)
    X = random_hermitian(2, rng)
    D = Superoperator.dissipator(A)
    expect = A @ X @ dagger(A) - 0.5 * (dagger(A) @ A @ X + X @ dagger(A) @ A)
    assert np.abs(D(X) - expect).max() < 1e-14
    # adjoint w.r.t. Hilbert-Schmidt
    Y = random_hermitian(2, rng)
    assert abs(np.trace(Y.conj().T @ D(X)) - np.trace(D.adjoint()(Y).conj().T @ X)) < 1e-13
    S = Superoperator.from_map(lambda M: A @ M, 2)
    assert np.abs(S(X) - A @ X).max() < 1e-14
    C = Superoperator.commutator(X)
    assert np.abs(C(Y) - (-1j) * (X @ Y - Y @ X)).max() < 1e-14


def test_expm_hermitian_matches_scipy():
    import scipy.linalg

    H = random_hermitian(8, make_rng(7))
    assert np.abs(expm_hermitian(H, -0.7j) - scipy.linalg.expm(-0.7j * H)).max() < 1e-12


def test_induced_norm_lower_bound_on_known_maps():
    rng = make_rng(8)
    # identity map has induced trace norm 1
    assert abs(induced_1norm_lower(Superoperator.identity(4), rng, restarts=8) - 1) < 1e-12
    # X -> 2X - tr(X) I/2: on a pure state the output has eigenvalues 3/2, -1/2
    S = Superoperator.from_map(lambda X: 2 * X - np.trace(X) * np.eye(2) / 2, 2)
    val = induced_1norm_lower(S, rng, restarts=16)
    assert abs(val - 2.0) < 1e-10


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_trace_norm_properties(seed):
    rng = make_rng(seed)
    rho = random_density_matrix(4, rng)
    assert abs(trace_norm(rho) - 1) < 1e-12
    X = random_hermitian(4, rng)
    assert trace_norm(X) >= op_norm(X) - 1e-12
    # contraction of trace norm under partial trace
    assert trace_norm(partial_trace(X, [1], 2)) <= trace_norm(X) + 1e-12
