"""Shell decompositions of Heisenberg-evolved, filtered and coherent
operators under radius-r truncations of the Hamiltonian, plus the
truncation error of the whole Lindbladian."""
from __future__ import annotations

import dataclasses
import math
from typing import Iterable, Sequence

import numpy as np

from . import kernels, lindbladian
from .hamiltonian import LocalHamiltonian
from .kernels import SiteKernelParams
from .lindbladian import EigenFrame
from .qop import PAULI, expm_hermitian, induced_1norm_lower, op_norm, tensor_embed


@dataclasses.dataclass(frozen=True)
class ShellNorm:
    r: int
    norm: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.norm <= self.bound * (1 + 1e-9) + 1e-13


def _heisenberg(H: np.ndarray, A: np.ndarray, t: float) -> np.ndarray:
    U = expm_hermitian(H, -1j * t)
    return U.conj().T @ A @ U


def heisenberg_shells(
    H: LocalHamiltonian, A: np.ndarray, site: int, t: float, r_max: int
) -> tuple[list[np.ndarray], list[ShellNorm]]:
    """F_r = A_{H_r}(t) - A_{H_{r-1}}(t) with H_r truncated around ``site``;
    F_0 evolves under the field alone.  ``A`` is a 2x2 operator on ``site``."""
    A_full = tensor_embed(A, [site], H.n)
    a_norm = op_norm(A)
    zeta = H.zeta
    shells, report = [], []
    prev = None
    for r in range(r_max + 1):
        cur = _heisenberg(H.truncate(site, r).dense, A_full, t)
        F = cur if prev is None else cur - prev
        bound = a_norm * (2 * zeta * abs(t)) ** r / math.factorial(r)
        shells.append(F)
        report.append(ShellNorm(r, op_norm(F), bound))
        prev = cur
    return shells, report


def support_defect(F: np.ndarray, support: Iterable[int], n: int, rng: np.random.Generator) -> float:
    """Largest change of F under a random unitary on one site outside ``support``;
    zero when F acts trivially there."""
    support = set(support)
    worst = 0.0
    for k in range(n):
        if k in support:
            continue
        Q, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
        U = tensor_embed(Q, [k], n)
        worst = max(worst, op_norm(U @ F @ U.conj().T - F))
    return worst


@dataclasses.dataclass(frozen=True)
class LRCheck:
    ell: float
    lhs: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.bound * (1 + 1e-9) + 1e-13


def lr_truncation_check(
    H: LocalHamiltonian,
    O: np.ndarray,
    X: Sequence[int],
    Omega: Iterable[int],
    Lam: Iterable[int],
    T: float,
) -> LRCheck:
    """|| O_{H_Lam}(T) - O_{H_Omega}(T) || <= ||O|| |X| (2 zeta |T|)^l / l!,
    l = dist(X, Lam minus Omega), for X inside Omega inside Lam."""
    X, Omega, Lam = list(X), set(Omega), set(Lam)
    if not set(X) <= Omega <= Lam:
        raise ValueError("need X inside Omega inside Lambda")
    O_full = tensor_embed(O, X, H.n)
    ell = H.set_distance(X, Lam - Omega)
    if ell < 2:
        raise ValueError(f"distance {ell} to the boundary must be at least 2")
    lhs = op_norm(_heisenberg(H.restrict(Lam).dense, O_full, T) - _heisenberg(H.restrict(Omega).dense, O_full, T))
    bound = 0.0 if math.isinf(ell) else op_norm(O) * len(X) * (2 * H.zeta * abs(T)) ** ell / math.factorial(int(ell))
    return LRCheck(ell, lhs, bound)


def jump_shells(
    H: LocalHamiltonian,
    site: int,
    pauli: str,
    omega: float,
    beta: float,
    r_max: int,
    params: SiteKernelParams | None = None,
) -> tuple[list[np.ndarray], list[ShellNorm]]:
    """G_r = A_{H_r}(w) - A_{H_{r-1}}(w) with the bound (2pi)^{-1/4} s^{-1/2} (2 zeta / s)^r."""
    p = params or kernels.field_resonant_params(H, beta)[site]
    P = tensor_embed(PAULI[pauli], [site], H.n)
    zeta = H.zeta
    shells, report = [], []
    prev = None
    for r in range(r_max + 1):
        cur = lindbladian.jump_operator(EigenFrame.of(H.truncate(site, r).dense), P, omega, p)
        G = cur if prev is None else cur - prev
        bound = (2 * np.pi) ** -0.25 / math.sqrt(p.sigma) * (2 * zeta / p.sigma) ** r
        shells.append(G)
        report.append(ShellNorm(r, op_norm(G), bound))
        prev = cur
    return shells, report


def coherent_regime(H: LocalHamiltonian, beta: float) -> bool:
    return beta <= 1 / (12 * H.zeta) if H.zeta > 0 else True


def coherent_shells(
    H: LocalHamiltonian,
    site: int,
    pauli: str,
    beta: float,
    r_max: int,
    params: SiteKernelParams | None = None,
) -> tuple[list[np.ndarray], list[ShellNorm]]:
    """K_r = Herm(C_{H_r} - C_{H_{r-1}}) with ||K_0|| <= 3 log(2 sqrt(Delta beta))
    and ||K_r|| <= 6 (6 zeta beta)^r.  The bounds assume beta <= 1/(12 zeta)."""
    if not coherent_regime(H, beta):
        raise ValueError(f"beta = {beta} is above 1/(12 zeta) = {1 / (12 * H.zeta):.4g}")
    p = params or kernels.field_resonant_params(H, beta)[site]
    P = tensor_embed(PAULI[pauli], [site], H.n)
    zeta = H.zeta
    shells, report = [], []
    prev = None
    for r in range(r_max + 1):
        cur = lindbladian.coherent_term(EigenFrame.of(H.truncate(site, r).dense), P, p)
        K = cur if prev is None else cur - prev
        K = (K + K.conj().T) / 2
        bound = 3 * math.log(2 * math.sqrt(p.Delta * beta)) if r == 0 else 6 * (6 * zeta * beta) ** r
        shells.append(K)
        report.append(ShellNorm(r, op_norm(K), bound))
        prev = cur
    return shells, report


@dataclasses.dataclass(frozen=True)
class TruncationGap:
    radius: int
    t: float
    lower_estimate: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.lower_estimate <= self.bound


def truncation_gap(
    H: LocalHamiltonian,
    beta: float,
    radius: int,
    t: float,
    rng: np.random.Generator,
    restarts: int = 256,
    params=None,
) -> TruncationGap:
    """Lower estimate of || e^{tL} - e^{tL_R} ||_diamond from pure inputs,
    against the bound 60 n t 2^{-R}."""
    if not coherent_regime(H, beta):
        raise ValueError(f"beta = {beta} is above 1/(12 zeta)")
    L = lindbladian.lindbladian(H, beta, params)
    LR = lindbladian.lindbladian(H, beta, params, radius=radius)
    diff = L.expm(t) - LR.expm(t)
    est = induced_1norm_lower(diff, rng, restarts=restarts)
    return TruncationGap(radius, t, est, 60 * H.n * t * 2.0**-radius)
