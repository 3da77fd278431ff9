"""Single-site contraction of the strictly local dissipative channel and
the closed-form Dobrushin-type update bounds built on it."""
from __future__ import annotations

import dataclasses
import math

import numpy as np
import scipy.integrate

from . import kernels
from .hamiltonian import LocalHamiltonian
from .kernels import SiteKernelParams
from .qop import PAULI, Superoperator, partial_trace, tensor_embed, trace_norm

C_DIAG = math.exp(-0.25) / math.sqrt(2)
DELTA_MAX = 1 / (3 * math.sqrt(2))

SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=np.complex128)  # |0><1|
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=np.complex128)  # |1><0|


@dataclasses.dataclass(frozen=True)
class OverlapTriple:
    """int gamma a^2, int gamma b^2, int gamma c^2 for the one-qubit packets
    a = f_hat'(w - h), b = f_hat'(w + h), c = f_hat'(w) with f_hat' = f_hat / sqrt(2 pi)."""

    a2: float
    b2: float
    c2: float

    @property
    def xy_sector(self) -> float:
        return self.a2 + self.b2 + 2 * self.c2

    @property
    def z_sector(self) -> float:
        return 2 * self.a2 + 2 * self.b2


def overlap_integrals(h: float, p: SiteKernelParams) -> OverlapTriple:
    """Closed forms of the three packet overlaps for field gap h."""
    pref = p.eta / math.sqrt(p.width2)
    w2 = 2 * p.width2

    def ov(center):
        return pref * math.exp(-((p.Delta + center) ** 2) / w2)

    # gamma peaks at -Delta; a is centred at +h, b at -h, c at 0
    return OverlapTriple(ov(h), ov(-h), ov(0.0))


def overlap_integrals_resonant(h: float, beta: float) -> OverlapTriple:
    return overlap_integrals(h, SiteKernelParams.resonant(beta, h))


def overlap_integrals_canonical(h: float, beta: float) -> OverlapTriple:
    """Same overlaps with the field-independent choice Delta = eta = sigma = 1/beta."""
    return overlap_integrals(h, SiteKernelParams.canonical(beta))


def overlap_integrals_by_quadrature(h: float, p: SiteKernelParams) -> OverlapTriple:
    def ov(center):
        def integrand(w):
            return kernels.gamma(w, p) * kernels.f_hat(w - center, p) ** 2 / (2 * np.pi)

        pts = sorted({-p.Delta, center})
        width = 12 * max(p.sigma, p.eta)
        val, _ = scipy.integrate.quad(integrand, pts[0] - width, pts[-1] + width, points=pts, limit=400, epsabs=0, epsrel=1e-13)
        return val

    return OverlapTriple(ov(h), ov(-h), ov(0.0))


def rotate_field_to_z(V: np.ndarray) -> tuple[float, np.ndarray]:
    """Return (h, U) with U V U^dagger = (h/2) sigma_Z + (tr V / 2) I."""
    w, Q = np.linalg.eigh(V)
    # eigh sorts ascending; put the upper level on |0>
    U = Q[:, ::-1].conj().T
    return float(w[1] - w[0]), U


def local_channel(h: float, p: SiteKernelParams, delta: float, m: int) -> Superoperator:
    """S = I + delta sum_P int gamma D_{G_0^P(w)} dw on site 0 of m qubits,
    written with the closed-form overlaps.  The field on site 0 is (h/2) sigma_Z."""
    ov = overlap_integrals(h, p)
    sp = tensor_embed(SIGMA_PLUS, [0], m)
    sm = tensor_embed(SIGMA_MINUS, [0], m)
    sz = tensor_embed(PAULI["Z"], [0], m)
    gen = (
        2 * ov.a2 * Superoperator.dissipator(sp).matrix
        + 2 * ov.b2 * Superoperator.dissipator(sm).matrix
        + ov.c2 * Superoperator.dissipator(sz).matrix
    )
    return Superoperator(np.eye(4**m) + delta * gen)


@dataclasses.dataclass(frozen=True)
class ContractionResult:
    ratio: float
    guaranteed: float
    sector_xy: float
    sector_z: float

    @property
    def passed(self) -> bool:
        return self.ratio <= self.guaranteed + 1e-12


def local_dissipative_contraction(
    h: float, beta: float, delta: float, X: np.ndarray, p: SiteKernelParams | None = None
) -> ContractionResult:
    """Apply the local channel to X (with tr_0 X = 0) and compare
    ||S(X)||_1 / ||X||_1 with 1 - c_diag delta."""
    if not 0 <= delta <= DELTA_MAX:
        raise ValueError(f"delta must lie in [0, {DELTA_MAX:.6f}]")
    m = int(round(math.log2(X.shape[0])))
    if m > 1 and np.abs(partial_trace(X, [0], m)).max() > 1e-10 * max(1.0, np.abs(X).max()):
        raise ValueError("input must have vanishing partial trace on the first site")
    if m == 1 and abs(np.trace(X)) > 1e-10 * max(1.0, np.abs(X).max()):
        raise ValueError("input must be traceless")
    p = p or SiteKernelParams.resonant(beta, h)
    ov = overlap_integrals(h, p)
    S = local_channel(h, p, delta, m)
    ratio = trace_norm(S(X)) / trace_norm(X)
    return ContractionResult(ratio, 1 - C_DIAG * delta, 1 - delta * ov.xy_sector, 1 - delta * ov.z_sector)


@dataclasses.dataclass(frozen=True)
class PauliDecomposition:
    p0: float
    p1: float
    p2: float
    p3: float

    def coefficients(self) -> tuple[float, float, float]:
        """The (c_x, c_y, c_z) this decomposition reproduces."""
        p0, p1, p2, p3 = self.p0, self.p1, self.p2, self.p3
        return (p0 + p1 - p2 - p3, p0 - p1 + p2 - p3, p0 - p1 - p2 + p3)

    @property
    def l1(self) -> float:
        return abs(self.p0) + abs(self.p1) + abs(self.p2) + abs(self.p3)


def pauli_norm_decomposition(cx: float, cy: float, cz: float) -> PauliDecomposition:
    """Write the map X -> cx X, Y -> cy Y, Z -> cz Z as
    p0 id + p1 Ad_X + p2 Ad_Y + p3 Ad_Z with sum |p| = max c.

    For sorted c1 >= c2 >= c3 the weights are p0 = (c1+c3)/2, (c1-c2)/2 on
    the largest axis, 0 on the middle one and (c3-c2)/2 on the smallest.
    """
    c = np.array([cx, cy, cz], dtype=float)
    order = np.argsort(-c, kind="stable")
    c1, c2, c3 = c[order]
    p = np.zeros(3)
    p[order[0]] = (c1 - c2) / 2
    p[order[1]] = 0.0
    p[order[2]] = (c3 - c2) / 2
    return PauliDecomposition(float((c1 + c3) / 2), float(p[0]), float(p[1]), float(p[2]))


# closed-form bounds ------------------------------------------------------------
def c_offdiag(r: int, beta: float, D: int, L: int) -> float:
    return 120 * (6 * beta * D * L) ** r


def c_const(beta: float, Delta_max: float) -> float:
    return 144 + 324 * (math.log(2 * math.sqrt(Delta_max * beta)) + 4) ** 2


def mixing_regime(beta: float, D: int, L: int) -> bool:
    return beta <= 1 / (28800 * (D * L) ** 3)


@dataclasses.dataclass(frozen=True)
class UpdateBounds:
    c_diag: float
    c_r: list[float]
    c_const: float


def update_matrix_bounds(n: int, beta: float, D: int, L: int, Delta_max: float, r_max: int | None = None) -> UpdateBounds:
    r_max = n if r_max is None else r_max
    return UpdateBounds(C_DIAG, [c_offdiag(r, beta, D, L) for r in range(r_max + 1)], c_const(beta, Delta_max))


def dobrushin_column_bound(n: int, beta: float, D: int, L: int, Delta_max: float, delta: float) -> float:
    """1 - delta/(2n) + c delta^2."""
    if not 0 <= delta <= 1 / (6 * math.sqrt(2)):
        raise ValueError("delta must lie in [0, 1/(6 sqrt 2)]")
    return 1 - delta / (2 * n) + c_const(beta, Delta_max) * delta**2


def mixing_time_bound(n: int, eps: float) -> int:
    """Number of discrete steps t_0 = ceil(2 log(2n/eps))."""
    if not 0 < eps < 1:
        raise ValueError("eps must lie in (0, 1)")
    return math.ceil(2 * math.log(2 * n / eps))


def influence_matrix_bound(H: LocalHamiltonian, beta: float, delta: float) -> np.ndarray:
    """Entrywise upper bound on n * (influence of site j on site i) from the
    per-site update matrices
    Q_i = -c_diag e_i e_i^T + sum_{r >= 1} 120 (6 beta zeta)^r 1_{ball(i, r)}."""
    n = H.n
    D = H.distances
    zeta = H.zeta
    Delta_max = max(p.Delta for p in kernels.field_resonant_params(H, beta))
    c = c_const(beta, Delta_max)
    out = np.zeros((n, n))
    for i in range(n):
        q = np.zeros(n)
        q[i] -= C_DIAG
        finite = D[i][np.isfinite(D[i])]
        for r in range(1, int(finite.max()) + 1):
            q += 120 * (6 * beta * zeta) ** r * (D[i] <= r)
        row = np.abs((1 + c * delta**2) * (np.arange(n) == i) + delta * q)
        out[i] = row
    return out
