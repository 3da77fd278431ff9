"""Ancilla gadget that turns a commuting-projector Hamiltonian at inverse
temperature beta into one with an on-site field whose data marginal is the
original Gibbs state at a larger effective inverse temperature."""
from __future__ import annotations

import dataclasses
import math
from typing import Literal

import numpy as np

from .hamiltonian import LocalHamiltonian, LocalTerm
from .qop import gibbs_state, partial_trace, trace_norm

HARDNESS_C = 1.87
N1 = np.diag([0.0, 1.0]).astype(np.complex128)  # |1><1| on an ancilla
N0 = np.diag([1.0, 0.0]).astype(np.complex128)


class NotCommutingProjectorsError(ValueError):
    pass


def projector_hamiltonian(n: int, terms: list[tuple[list[int], np.ndarray]]) -> LocalHamiltonian:
    """Sum of projectors with any support size, validated to commute."""
    H = LocalHamiltonian.build(n, terms, None, check_norm=False, min_support=1)
    validate_commuting_projectors(H)
    return H


def validate_commuting_projectors(H: LocalHamiltonian, tol: float = 1e-9) -> None:
    dense = [H.term_dense(a) for a in range(len(H.terms))]
    for a, P in enumerate(dense):
        if np.abs(P @ P - P).max() > tol:
            raise NotCommutingProjectorsError(f"term {a} is not a projector")
    for a in range(len(dense)):
        for b in range(a + 1, len(dense)):
            if np.abs(dense[a] @ dense[b] - dense[b] @ dense[a]).max() > tol:
                raise NotCommutingProjectorsError(f"terms {a} and {b} do not commute")


def joint_diagonalize(ops: list[np.ndarray], rng: np.random.Generator, tol: float = 1e-9) -> np.ndarray:
    """Common eigenbasis of commuting Hermitian matrices from a random linear
    combination; raises if some operator is not diagonal in it."""
    if not ops:
        raise ValueError("nothing to diagonalise")
    coeffs = rng.normal(size=len(ops))
    _, U = np.linalg.eigh(sum(c * A for c, A in zip(coeffs, ops)))
    for k, A in enumerate(ops):
        B = U.conj().T @ A @ U
        if np.abs(B - np.diag(np.diag(B))).max() > tol:
            raise NotCommutingProjectorsError(f"operator {k} is not diagonal in the joint basis")
    return U


def ancilla_index(H_C: LocalHamiltonian, a: int, ell: int, t: int) -> int:
    return H_C.n + a * t + ell


def build_gadget(H_C: LocalHamiltonian, h: float, t: int) -> LocalHamiltonian:
    """Each projector P_a gets t ancillas; the (a, l) gadget is
    h n_{a,l} + P_a (x) (1 - n_{a,l}), with the h n_{a,l} part as the field."""
    if t < 1 or h < 0:
        raise ValueError("need t >= 1 and h >= 0")
    m = len(H_C.terms)
    n_total = H_C.n + m * t
    terms = []
    for a, term in enumerate(H_C.terms):
        for ell in range(t):
            anc = ancilla_index(H_C, a, ell, t)
            terms.append(LocalTerm(term.support + (anc,), np.kron(term.matrix, N0)))
    field = [np.zeros((2, 2), dtype=np.complex128)] * H_C.n + [h * N1] * (m * t)
    return LocalHamiltonian.build(n_total, terms, field)


def beta_eff(beta: float, h: float, t: int) -> float:
    """t log((1 + e^{-beta h}) / (e^{-beta} + e^{-beta h}))."""
    return t * (np.logaddexp(0.0, -beta * h) - np.logaddexp(-beta, -beta * h))


def data_marginal(H_C: LocalHamiltonian, beta: float, h: float, t: int) -> np.ndarray:
    G = build_gadget(H_C, h, t)
    sigma = gibbs_state(G.dense, beta)
    return partial_trace(sigma, range(H_C.n, G.n), G.n)


@dataclasses.dataclass(frozen=True)
class MarginalCheck:
    beta_eff: float
    distance: float

    def passed(self, tol: float = 1e-10) -> bool:
        return self.distance <= tol


def verify_marginal(H_C: LocalHamiltonian, beta: float, h: float, t: int) -> MarginalCheck:
    """|| tr_anc(Gibbs of gadget at beta) - Gibbs of H_C at beta_eff ||_1."""
    if H_C.n + len(H_C.terms) * t > 12:
        raise MemoryError("gadget too large for a dense check")
    b = beta_eff(beta, h, t)
    target = gibbs_state(H_C.dense, b)
    return MarginalCheck(float(b), trace_norm(data_marginal(H_C, beta, h, t) - target))


def choose_params(beta: float, regime: Literal["case1", "case2"], c: float = HARDNESS_C) -> tuple[int, float]:
    """(t, h_min) reaching beta_eff >= c.

    case1: t = ceil(c/beta) + 1 and h_min = log(4c/beta)/beta;
    case2: t = ceil(2c/beta) and h_min = 1/2.
    """
    if not 0 < beta < 1:
        raise ValueError("beta must lie in (0, 1)")
    if regime == "case1":
        return math.ceil(c / beta) + 1, math.log(4 * c / beta) / beta
    if regime == "case2":
        return math.ceil(2 * c / beta), 0.5
    raise ValueError(f"unknown regime {regime!r}")


def computational_distribution(H: LocalHamiltonian, beta: float) -> np.ndarray:
    """Diagonal of the Gibbs state in the computational basis."""
    return np.real(np.diag(gibbs_state(H.dense, beta)))


def fitted_beta_eff(marginal: np.ndarray, H_C: LocalHamiltonian) -> float:
    """Inverse temperature read off a state diagonal in the eigenbasis of H_C,
    from the populations of its lowest and highest levels."""
    E, U = np.linalg.eigh(H_C.dense)
    pops = np.real(np.einsum("ik,ij,jk->k", U.conj(), marginal, U))
    lo, hi = int(np.argmin(E)), int(np.argmax(E))
    if E[hi] - E[lo] < 1e-12:
        raise ValueError("H_C has a single energy level")
    return float((np.log(pops[lo]) - np.log(pops[hi])) / (E[hi] - E[lo]))
