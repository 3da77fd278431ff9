"""Detailed-balanced Lindbladian with per-site filter parameters.

For each site j and Pauli P the generator contains the dissipator
``int gamma(w) D_{A(w)} dw`` of the filtered jump operator

    A(w) = (2 pi)^{-1/2} sum_nu P_nu f_hat(w - nu)

and a coherent correction ``-i [C, .]`` with
``C = sum g_hat(nu1, nu2) P_nu2^dag P_nu1``.

Everything is assembled in the energy eigenbasis, where a matrix unit
|a><b| carries the Bohr frequency E_a - E_b.  The coherent term and the
anticommutator part of the dissipator combine into one left and one right
multiplication whose coefficients are

    -alpha / (1 + exp(+beta s/2))   (left),   -alpha / (1 + exp(-beta s/2))   (right)

with s = nu1 - nu2.  Working with log alpha keeps both the generator and
its Gibbs-conjugated form finite at any field strength.
"""
from __future__ import annotations

import dataclasses
import math
from typing import Callable, Iterable, Sequence

import numpy as np
import scipy.linalg
import scipy.special

from . import kernels
from .hamiltonian import LocalHamiltonian
from .kernels import SiteKernelParams
from .qop import PAULI, Superoperator, gibbs_weights, hermitian_part, tensor_embed, trace_norm, unvec, vec

PAULI_LABELS = ("X", "Y", "Z")
LogAlpha = Callable[[np.ndarray, np.ndarray, SiteKernelParams], np.ndarray]

MAX_SUPEROPERATOR_QUBITS = 5


class IllConditionedError(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class EigenFrame:
    """Energy eigenbasis of a dense Hamiltonian."""

    energies: np.ndarray
    U: np.ndarray

    @classmethod
    def of(cls, H: np.ndarray) -> "EigenFrame":
        E, U = np.linalg.eigh(hermitian_part(np.asarray(H)))
        return cls(E, U)

    @property
    def dim(self) -> int:
        return self.energies.size

    @property
    def bohr(self) -> np.ndarray:
        """bohr[a, b] = E_a - E_b."""
        return self.energies[:, None] - self.energies[None, :]

    def to_eigen(self, A: np.ndarray) -> np.ndarray:
        return self.U.conj().T @ A @ self.U

    def from_eigen(self, A: np.ndarray) -> np.ndarray:
        return self.U @ A @ self.U.conj().T

    def gibbs(self, beta: float) -> np.ndarray:
        return (self.U * gibbs_weights(self.energies, beta)) @ self.U.conj().T


def _check_size(n: int):
    if n > MAX_SUPEROPERATOR_QUBITS:
        raise MemoryError(f"dense superoperator on {n} qubits exceeds the {MAX_SUPEROPERATOR_QUBITS}-qubit limit")


def _resolve_params(H: LocalHamiltonian, beta: float, params) -> list[SiteKernelParams]:
    if params is None:
        return kernels.field_resonant_params(H, beta)
    if isinstance(params, SiteKernelParams):
        return [params] * H.n
    params = list(params)
    if len(params) != H.n:
        raise ValueError(f"expected {H.n} site parameter sets, got {len(params)}")
    for j, p in enumerate(params):
        if abs(p.beta - beta) > 1e-12 * beta:
            raise ValueError(f"site {j} parameters were built for beta = {p.beta}, not {beta}")
    return params


def site_paulis(frame: EigenFrame, site: int, n: int, labels: Sequence[str] = PAULI_LABELS) -> list[np.ndarray]:
    return [frame.to_eigen(tensor_embed(PAULI[P], [site], n)) for P in labels]


def bohr_components(frame: EigenFrame, A: np.ndarray, tol: float = 1e-8) -> dict[float, np.ndarray]:
    """Split A into pieces A_nu with e^{iHt} A e^{-iHt} = sum_nu A_nu e^{i nu t}.
    Frequencies closer than ``tol`` times the spectral width are merged."""
    At = frame.to_eigen(A)
    N = frame.bohr
    width = max(np.ptp(frame.energies), 1e-300)
    flat = np.sort(np.unique(np.round(N.ravel(), 15)))
    groups: list[list[float]] = [[flat[0]]]
    for x in flat[1:]:
        if x - groups[-1][-1] > tol * width:
            groups.append([x])
        else:
            groups[-1].append(x)
    out = {}
    for g in groups:
        mask = (N >= g[0] - 1e-15 * width) & (N <= g[-1] + 1e-15 * width)
        block = np.where(mask, At, 0)
        if np.any(block):
            out[float(np.mean(g))] = frame.from_eigen(block)
    return out


def _site_generator_eigen(
    frame: EigenFrame,
    paulis_eig: Sequence[np.ndarray],
    p: SiteKernelParams,
    shift: float = 0.0,
    log_alpha_fn: LogAlpha | None = None,
) -> np.ndarray:
    """Superoperator of one site's dissipative and coherent terms in the
    eigenbasis.  ``shift = 1`` returns the Gibbs-conjugated map
    Y -> sigma^{-1/2} L(sigma^{1/2} Y sigma^{1/2}) sigma^{-1/2} instead."""
    la = kernels.log_alpha if log_alpha_fn is None else log_alpha_fn
    beta = p.beta
    N = frame.bohr
    D = frame.dim

    # jump part, indices (d, a, c, b): |a><b| rho |c><d|
    nu1 = N[None, :, None, :]
    nu2 = N[:, None, :, None]
    weight = np.exp(la(nu1, nu2, p) + shift * beta * (nu1 + nu2) / 2)
    ops = sum(np.einsum("ab,dc->dacb", Pt, Pt.conj()) for Pt in paulis_eig)
    M = (weight * ops).reshape(D * D, D * D)

    # left and right multiplications; tensor axes (b, x, y) with nu1 = N[b, y], nu2 = N[b, x]
    nu1 = N[:, None, :]
    nu2 = N[:, :, None]
    s = beta * (nu1 - nu2) / 2
    base = la(nu1, nu2, p)
    left = -np.exp(base - np.logaddexp(0, s) + shift * s)
    right = -np.exp(base - np.logaddexp(0, -s) - shift * s)
    KL = sum(np.einsum("bx,by,bxy->xy", Pt.conj(), Pt, left) for Pt in paulis_eig)
    KR = sum(np.einsum("bx,by,bxy->xy", Pt.conj(), Pt, right) for Pt in paulis_eig)
    eye = np.eye(D)
    return M + np.kron(eye, KL) + np.kron(KR.T, eye)


def generator_eigenbasis(
    H: LocalHamiltonian,
    beta: float,
    params=None,
    *,
    shift: float = 0.0,
    log_alpha_fn: LogAlpha | None = None,
) -> tuple[EigenFrame, np.ndarray]:
    """Full generator (all sites, all Paulis) in the eigenbasis of H."""
    _check_size(H.n)
    params = _resolve_params(H, beta, params)
    frame = EigenFrame.of(H.dense)
    M = np.zeros((frame.dim**2,) * 2, dtype=np.complex128)
    for j in range(H.n):
        M += _site_generator_eigen(frame, site_paulis(frame, j, H.n), params[j], shift, log_alpha_fn)
    return frame, M


def lindbladian(
    H: LocalHamiltonian,
    beta: float,
    params=None,
    *,
    radius: float | None = None,
    sites: Iterable[int] | None = None,
    log_alpha_fn: LogAlpha | None = None,
) -> Superoperator:
    """Generator in the computational basis.

    With ``radius`` set, the terms of site j are built from the truncated
    Hamiltonian H.truncate(j, radius) while the filter parameters still
    come from the full field.
    """
    _check_size(H.n)
    params = _resolve_params(H, beta, params)
    sites = range(H.n) if sites is None else list(sites)
    D = 2**H.n
    total = np.zeros((D * D,) * 2, dtype=np.complex128)
    shared = EigenFrame.of(H.dense) if radius is None else None
    for j in sites:
        frame = shared if shared is not None else EigenFrame.of(H.truncate(j, radius).dense)
        M = _site_generator_eigen(frame, site_paulis(frame, j, H.n), params[j], 0.0, log_alpha_fn)
        S = np.kron(frame.U.conj(), frame.U)
        total += S @ M @ S.conj().T
    return Superoperator(total)


# individual pieces -----------------------------------------------------------
def jump_operator(frame: EigenFrame, P: np.ndarray, omega: float, p: SiteKernelParams) -> np.ndarray:
    """A(w) = (2 pi)^{-1/2} sum_nu P_nu f_hat(w - nu)."""
    Pt = frame.to_eigen(P)
    return frame.from_eigen(Pt * kernels.f_hat(omega - frame.bohr, p) / math.sqrt(2 * math.pi))


def jump_operator_by_time_quadrature(
    H: np.ndarray, P: np.ndarray, omega: float, p: SiteKernelParams, nodes: int = 120
) -> np.ndarray:
    """(2 pi)^{-1/2} int e^{iHt} P e^{-iHt} e^{-i w t} f(t) dt by Gauss-Hermite
    quadrature, with the Heisenberg evolution done by matrix exponentials."""
    x, w = np.polynomial.hermite.hermgauss(nodes)
    pref = (2 / np.pi) ** 0.25 * math.sqrt(p.sigma) / p.sigma
    out = np.zeros_like(P, dtype=np.complex128)
    for xk, wk in zip(x, w):
        t = xk / p.sigma
        Ut = scipy.linalg.expm(1j * t * H)
        out += wk * np.exp(-1j * omega * t) * (Ut @ P @ Ut.conj().T)
    return pref * out / math.sqrt(2 * math.pi)


def coherent_term(frame: EigenFrame, P: np.ndarray, p: SiteKernelParams) -> np.ndarray:
    """C = sum g_hat(nu1, nu2) P_nu2^dag P_nu1, Hermitian."""
    Pt = frame.to_eigen(P)
    N = frame.bohr
    g = kernels.g_hat(N[:, None, :], N[:, :, None], p)  # (b, a, c): nu1 = N[b, c], nu2 = N[b, a]
    C = np.einsum("ba,bc,bac->ac", Pt.conj(), Pt, g)
    return frame.from_eigen(C)


def dissipator(H: LocalHamiltonian, beta: float, params=None, sites: Iterable[int] | None = None) -> Superoperator:
    """sum_j sum_P int gamma D_{A_j^P(w)} dw via the closed-form overlaps alpha."""
    _check_size(H.n)
    params = _resolve_params(H, beta, params)
    frame = EigenFrame.of(H.dense)
    N = frame.bohr
    D = frame.dim
    total = np.zeros((D * D,) * 2, dtype=np.complex128)
    eye = np.eye(D)
    for j in range(H.n) if sites is None else sites:
        p = params[j]
        weight = kernels.alpha(N[None, :, None, :], N[:, None, :, None], p)
        a3 = kernels.alpha(N[:, None, :], N[:, :, None], p)
        for Pt in site_paulis(frame, j, H.n):
            M = (weight * np.einsum("ab,dc->dacb", Pt, Pt.conj())).reshape(D * D, D * D)
            K = np.einsum("bx,by,bxy->xy", Pt.conj(), Pt, a3)
            total += M - 0.5 * (np.kron(eye, K) + np.kron(K.T, eye))
    S = np.kron(frame.U.conj(), frame.U)
    return Superoperator(S @ total @ S.conj().T)


def coherent_part(H: LocalHamiltonian, beta: float, params=None) -> Superoperator:
    """sum_j sum_P -i [C_j^P, .]"""
    params = _resolve_params(H, beta, params)
    frame = EigenFrame.of(H.dense)
    D = frame.dim
    C = np.zeros((D, D), dtype=np.complex128)
    for j in range(H.n):
        for P in PAULI_LABELS:
            C += coherent_term(frame, tensor_embed(PAULI[P], [j], H.n), params[j])
    return Superoperator.commutator(C)


def dissipator_by_frequency_quadrature(
    H: LocalHamiltonian, beta: float, params=None, sites: Iterable[int] | None = None, nodes: int = 80
) -> Superoperator:
    """Same dissipator with the w-integral done by Gauss-Hermite quadrature
    over explicit jump operators."""
    params = _resolve_params(H, beta, params)
    frame = EigenFrame.of(H.dense)
    x, w = np.polynomial.hermite.hermgauss(nodes)
    D = frame.dim
    total = np.zeros((D * D,) * 2, dtype=np.complex128)
    for j in range(H.n) if sites is None else sites:
        p = params[j]
        for P in PAULI_LABELS:
            Pj = tensor_embed(PAULI[P], [j], H.n)
            for xk, wk in zip(x, w):
                omega = -p.Delta + math.sqrt(2) * p.eta * xk
                A = jump_operator(frame, Pj, omega, p)
                total += math.sqrt(2) * p.eta * wk * Superoperator.dissipator(A).matrix
    return Superoperator(total)


# detailed balance --------------------------------------------------------------
def db_defect(L: Superoperator, sigma: np.ndarray, max_condition: float = 1e14) -> float:
    """|| L^dag - Gamma^{-1} L Gamma ||, Gamma(X) = sigma^{1/2} X sigma^{1/2},
    evaluated in the eigenbasis of sigma."""
    p, V = np.linalg.eigh(hermitian_part(sigma))
    if p.min() <= 0 or p.max() / p.min() > max_condition:
        raise IllConditionedError(
            "state is too ill-conditioned for a dense detailed-balance check; use db_defect_spectral"
        )
    S = np.kron(V.conj(), V)
    Le = S.conj().T @ L.matrix @ S
    lp = np.log(p) / 2
    out_w = (lp[:, None] + lp[None, :]).T.reshape(-1)  # column-stacked index a + dim d
    conj = Le * np.exp(out_w[None, :] - out_w[:, None])
    return float(np.linalg.norm(Le.conj().T - conj, 2))


def db_defect_spectral(
    H: LocalHamiltonian, beta: float, params=None, log_alpha_fn: LogAlpha | None = None
) -> float:
    """Detailed-balance defect computed from log-domain coefficients, valid
    for arbitrarily large fields."""
    _, M0 = generator_eigenbasis(H, beta, params, shift=0.0, log_alpha_fn=log_alpha_fn)
    _, M1 = generator_eigenbasis(H, beta, params, shift=1.0, log_alpha_fn=log_alpha_fn)
    return float(np.linalg.norm(M0.conj().T - M1, 2))


def fixed_point_defect(L: Superoperator, sigma: np.ndarray) -> float:
    return trace_norm(L(sigma))


def fixed_point_defect_spectral(H: LocalHamiltonian, beta: float, params=None) -> float:
    frame, M = generator_eigenbasis(H, beta, params)
    sigma = np.diag(gibbs_weights(frame.energies, beta))
    return trace_norm(unvec(M @ vec(sigma)))


# dynamics ----------------------------------------------------------------------
def spectral_gap(L: Superoperator, tol: float = 1e-9) -> float:
    """Distance from zero of the non-stationary spectrum; 0 if the kernel is
    degenerate."""
    lam = np.linalg.eigvals(L.matrix)
    scale = max(1.0, np.abs(lam).max())
    re = np.sort(lam.real)[::-1]
    if re[0] > tol * scale:
        raise ValueError(f"generator has eigenvalue with positive real part {re[0]:.3e}")
    if re[1] > -tol * scale:
        return 0.0
    return float(-re[1])


class _Propagator:
    def __init__(self, L: Superoperator, max_condition: float = 1e10):
        self.L = L
        lam, V = np.linalg.eig(L.matrix)
        cond = np.linalg.cond(V)
        self.eig = (lam, V, np.linalg.inv(V)) if cond < max_condition else None

    def __call__(self, v: np.ndarray, t: float) -> np.ndarray:
        if self.eig is not None:
            lam, V, Vinv = self.eig
            return V @ (np.exp(lam * t) * (Vinv @ v))
        return scipy.linalg.expm(t * self.L.matrix) @ v


def evolve(L: Superoperator, rho0: np.ndarray, t_grid: Sequence[float]) -> list[np.ndarray]:
    prop = _Propagator(L)
    v0 = vec(rho0)
    return [unvec(prop(v0, t)) for t in t_grid]


def mixing_curve(L: Superoperator, rho0: np.ndarray, sigma: np.ndarray, t_grid: Sequence[float]) -> np.ndarray:
    """||e^{tL} rho0 - sigma||_1 along ``t_grid``."""
    return np.array([trace_norm(rho - sigma) for rho in evolve(L, rho0, t_grid)])
