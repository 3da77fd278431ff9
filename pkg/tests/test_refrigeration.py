import math

import numpy as np
import pytest

from gibbslab import refrigeration as rf


P11 = np.diag([0.0, 0, 0, 1])


def _single():
    return rf.projector_hamiltonian(2, [([0, 1], P11)])


def test_beta_eff_closed_form_value():
    # t = 2, beta = 1/2, h = 3
    assert rf.beta_eff(0.5, 3.0, 2) == pytest.approx(
        2 * math.log((1 + math.exp(-1.5)) / (math.exp(-0.5) + math.exp(-1.5))), rel=1e-15
    )
    assert rf.beta_eff(0.5, 3.0, 2) == pytest.approx(0.776303, abs=5e-7)


def test_half_field_gives_half_beta_per_ancilla():
    for beta, t in ((0.3, 2), (0.8, 5)):
        assert rf.beta_eff(beta, 0.5, t) == pytest.approx(t * beta / 2, rel=1e-15)


def test_beta_eff_huge_field_limit():
    assert rf.beta_eff(0.4, 1e6, 3) == pytest.approx(3 * 0.4, rel=1e-14)


@pytest.mark.parametrize("h", [0.0, 0.5, 3.0, 1e6])
def test_marginal_is_gibbs_at_beta_eff(h):
    res = rf.verify_marginal(_single(), 0.5, h, 2)
    assert res.passed(1e-10)
    marg = rf.data_marginal(_single(), 0.5, h, 2)
    assert rf.fitted_beta_eff(marg, _single()) == pytest.approx(res.beta_eff, abs=1e-12)


def test_gadget_layout():
    G = rf.build_gadget(_single(), 2.0, 3)
    assert G.n == 5
    assert [t.support for t in G.terms] == [(0, 1, 2), (0, 1, 3), (0, 1, 4)]
    assert G.locality == 3
    assert rf.ancilla_index(_single(), 0, 2, 3) == 4


def test_non_commuting_projectors_rejected():
    plus = np.full((2, 2), 0.5)
    with pytest.raises(rf.NotCommutingProjectorsError):
        rf.projector_hamiltonian(1, [([0], np.diag([1.0, 0])), ([0], plus)])
    with pytest.raises(rf.NotCommutingProjectorsError):
        rf.projector_hamiltonian(1, [([0], np.diag([2.0, 0]))])


def test_choose_params():
    assert rf.choose_params(0.9, "case1") == (4, pytest.approx(2.35288, abs=5e-6))
    assert rf.choose_params(0.5, "case2") == (8, 0.5)
    with pytest.raises(ValueError):
        rf.choose_params(1.2, "case1")
    with pytest.raises(ValueError):
        rf.choose_params(0.5, "case3")


def test_hardness_threshold_minimum_over_grid():
    grid = np.round(np.arange(0.05, 0.951, 0.05), 2)
    lows = {}
    for regime in ("case1", "case2"):
        lows[regime] = min(rf.beta_eff(b, *reversed(rf.choose_params(b, regime))) for b in grid)
    assert lows["case1"] == pytest.approx(1.9367, abs=5e-5)
    assert lows["case2"] == pytest.approx(1.875, abs=5e-5)


def test_computational_distribution_normalized():
    H = rf.projector_hamiltonian(2, [([0, 1], P11)])
    p = rf.computational_distribution(H, 1.0)
    assert p.sum() == pytest.approx(1.0)
    assert p[3] == pytest.approx(math.exp(-1) / (3 + math.exp(-1)))


def test_joint_diagonalize():
    from gibbslab.report import make_rng

    A = np.kron(np.diag([1.0, 0]), np.eye(2))
    B = np.kron(np.eye(2), np.full((2, 2), 0.5))
    U = rf.joint_diagonalize([A, B], make_rng(0))
    for M in (A, B):
        D = U.conj().T @ M @ U
        assert np.abs(D - np.diag(np.diag(D))).max() < 1e-12
