import math

import numpy as np
import pytest

from gibbslab import hamiltonian as ham
from gibbslab import kernels, lindbladian as lb
from gibbslab.kernels import SiteKernelParams
from gibbslab.qop import PAULI, gibbs_state, random_density_matrix, tensor_embed
from gibbslab.report import make_rng


def _instance(n=3, h=5.0, seed=0):
    return ham.random_chain(n, make_rng(seed), h=h, random_field_axis=True)


@pytest.mark.parametrize("h", [0.0, 3.0, 200.0, 1e6])
def test_detailed_balance_and_fixed_point(h):
    H = _instance(3, h)
    beta = 0.1
    assert lb.db_defect_spectral(H, beta) < 1e-9
    assert lb.fixed_point_defect_spectral(H, beta) < 1e-10
    L = lb.lindbladian(H, beta)
    assert lb.fixed_point_defect(L, gibbs_state(H.dense, beta)) < 1e-10


def test_dense_db_defect_agrees_with_spectral_route():
    H = _instance(2, 4.0, seed=3)
    beta = 0.3
    L = lb.lindbladian(H, beta)
    assert lb.db_defect(L, gibbs_state(H.dense, beta)) < 1e-10


def test_dense_db_defect_refuses_ill_conditioned_state():
    H = _instance(2, 1e6)
    L = lb.lindbladian(H, 0.2)
    with pytest.raises(lb.IllConditionedError):
        lb.db_defect(L, gibbs_state(H.dense, 0.2))


def test_negative_control_broken_coefficients():
    H = _instance(2, 2.0, seed=5)
    beta = 0.5

    def skewed(nu1, nu2, p):
        return kernels.log_alpha(nu1, nu2, p) + np.where(nu1 > nu2 + 1e-9, math.log(1.1), 0.0)

    assert lb.db_defect_spectral(H, beta, log_alpha_fn=skewed) > 1e-3

    # a skew depending on s = nu1 - nu2 alone keeps sigma stationary; one on nu1 does not
    def lopsided(nu1, nu2, p):
        return kernels.log_alpha(nu1, nu2, p) + np.where(nu1 > 1e-9, math.log(1.1), 0.0)

    L = lb.lindbladian(H, beta, log_alpha_fn=lopsided)
    assert lb.fixed_point_defect(L, gibbs_state(H.dense, beta)) > 1e-4


def test_trace_preservation_and_hermiticity_preservation():
    H = _instance(3, 10.0)
    L = lb.lindbladian(H, 0.2)
    rho = random_density_matrix(8, make_rng(1))
    out = L(rho)
    assert abs(np.trace(out)) < 1e-12
    assert np.abs(out - out.conj().T).max() < 1e-12


def test_dissipator_plus_coherent_is_the_combined_generator():
    H = _instance(2, 7.0, seed=2)
    beta = 0.25
    L = lb.lindbladian(H, beta)
    split = lb.dissipator(H, beta) + lb.coherent_part(H, beta)
    assert np.abs(L.matrix - split.matrix).max() < 1e-12


def test_dissipator_by_frequency_quadrature():
    H = _instance(2, 3.0, seed=4)
    beta = 0.4
    a = lb.dissipator(H, beta).matrix
    b = lb.dissipator_by_frequency_quadrature(H, beta).matrix
    assert np.abs(a - b).max() < 1e-10


def test_jump_operator_two_routes():
    H = _instance(2, 3.0, seed=6)
    p = SiteKernelParams.resonant(0.3, 3.0)
    frame = lb.EigenFrame.of(H.dense)
    P = tensor_embed(PAULI["X"], [0], 2)
    for omega in (-p.Delta, 0.0, 2.0):
        a = lb.jump_operator(frame, P, omega, p)
        b = lb.jump_operator_by_time_quadrature(H.dense, P, omega, p)
        assert np.abs(a - b).max() < 1e-12


def test_coherent_term_hermitian():
    H = _instance(2, 30.0, seed=7)
    p = SiteKernelParams.resonant(0.1, 30.0)
    C = lb.coherent_term(lb.EigenFrame.of(H.dense), tensor_embed(PAULI["Y"], [1], 2), p)
    assert np.abs(C - C.conj().T).max() < 1e-14


def test_bohr_components_reassemble_operator():
    H = _instance(2, 1.0, seed=8)
    frame = lb.EigenFrame.of(H.dense)
    A = tensor_embed(PAULI["X"], [1], 2)
    comps = lb.bohr_components(frame, A)
    assert np.abs(sum(comps.values()) - A).max() < 1e-13
    for nu, Anu in comps.items():
        assert np.abs(H.dense @ Anu - Anu @ H.dense - nu * Anu).max() < 1e-8 * max(1, abs(nu))


def test_gap_and_monotone_mixing():
    H = _instance(3, 5.0, seed=9)
    beta = 0.2
    L = lb.lindbladian(H, beta)
    gap = lb.spectral_gap(L)
    assert gap > 0
    sigma = gibbs_state(H.dense, beta)
    rho0 = np.diag([1.0] + [0.0] * 7)
    curve = lb.mixing_curve(L, rho0, sigma, np.linspace(0, 20 / gap, 40))
    assert np.diff(curve).max() <= 1e-12
    assert curve[-1] < 1e-6


def test_truncated_generator_radius_covering_everything_is_exact():
    H = _instance(3, 2.0, seed=10)
    L = lb.lindbladian(H, 0.1)
    LR = lb.lindbladian(H, 0.1, radius=5)
    assert np.abs(L.matrix - LR.matrix).max() < 1e-12


def test_explicit_params_override():
    H = _instance(2, 0.0, seed=11)
    beta = 0.2
    params = [SiteKernelParams.canonical(beta)] * 2
    assert lb.db_defect_spectral(H, beta, params) < 1e-10
    with pytest.raises(ValueError):
        lb.lindbladian(H, beta, [SiteKernelParams.canonical(0.3)] * 2)


def test_size_cap():
    with pytest.raises(MemoryError):
        lb.lindbladian(ham.chain(lb.MAX_SUPEROPERATOR_QUBITS + 1), 0.1)
