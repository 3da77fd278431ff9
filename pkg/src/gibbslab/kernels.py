"""Filter, weight and coherent-term kernels with their Fourier pairs.

Fourier convention: ``g_hat(w) = int g(t) exp(-i w t) dt``.  All functions
are vectorised over their first argument.
"""
from __future__ import annotations

import dataclasses
import functools
import math
from typing import Callable, Sequence

import numpy as np
import scipy.integrate
import scipy.special

from .hamiltonian import LocalHamiltonian

_CONSTRAINT_RTOL = 1e-12


class ParameterError(ValueError):
    pass


@dataclasses.dataclass(frozen=True)
class SiteKernelParams:
    """Per-site filter parameters; must satisfy beta (eta^2 + sigma^2) = 2 Delta."""

    beta: float
    Delta: float
    sigma: float
    eta: float

    def __post_init__(self):
        if min(self.beta, self.Delta, self.sigma, self.eta) <= 0:
            raise ParameterError(f"kernel parameters must be positive: {self}")
        lhs = self.beta * (self.eta**2 + self.sigma**2)
        if abs(lhs - 2 * self.Delta) > _CONSTRAINT_RTOL * 2 * self.Delta:
            raise ParameterError(f"beta(eta^2+sigma^2) = {lhs!r} differs from 2 Delta = {2 * self.Delta!r}")

    @property
    def width2(self) -> float:
        return self.eta**2 + self.sigma**2

    @classmethod
    def resonant(cls, beta: float, gap: float = 0.0) -> "SiteKernelParams":
        """Delta = max(1/beta, gap) and eta = sigma = sqrt(Delta/beta)."""
        Delta = max(1.0 / beta, float(gap))
        s = math.sqrt(Delta / beta)
        return cls(beta, Delta, s, s)

    @classmethod
    def canonical(cls, beta: float) -> "SiteKernelParams":
        """Field-independent choice Delta = eta = sigma = 1/beta."""
        return cls(beta, 1 / beta, 1 / beta, 1 / beta)


def field_resonant_params(H: LocalHamiltonian, beta: float) -> list[SiteKernelParams]:
    if beta <= 0:
        raise ParameterError("beta must be positive")
    return [SiteKernelParams.resonant(beta, g) for g in H.field_gaps]


# closed forms --------------------------------------------------------------
def f_time(t, p: SiteKernelParams):
    t = np.asarray(t, dtype=float)
    return (2 / np.pi) ** 0.25 * np.sqrt(p.sigma) * np.exp(-(p.sigma * t) ** 2)


def f_hat(w, p: SiteKernelParams):
    w = np.asarray(w, dtype=float)
    return (2 * np.pi) ** 0.25 / np.sqrt(p.sigma) * np.exp(-(w**2) / (4 * p.sigma**2))


def gamma(w, p: SiteKernelParams):
    w = np.asarray(w, dtype=float)
    return np.exp(-((w + p.Delta) ** 2) / (2 * p.eta**2))


def gamma_integral(p: SiteKernelParams) -> float:
    return math.sqrt(2 * math.pi) * p.eta


def b2(t, p: SiteKernelParams):
    t = np.asarray(t, dtype=float)
    return 2 * p.eta * np.exp(-4 * p.Delta * t**2 / p.beta - 2j * p.Delta * t)


def b2_hat(w, p: SiteKernelParams):
    w = np.asarray(w, dtype=float)
    return p.eta * np.sqrt(np.pi * p.beta / p.Delta) * np.exp(-p.beta * (w + 2 * p.Delta) ** 2 / (16 * p.Delta))


def b1_hat(w, p: SiteKernelParams):
    w = np.asarray(w, dtype=float)
    return 1j / (2 * np.sqrt(2 * np.pi)) * np.exp(-(w**2) / (8 * p.sigma**2)) * np.tanh(p.beta * w / 4)


def log_alpha(nu1, nu2, p: SiteKernelParams):
    """log of int gamma(w) f_hat(w - nu1) f_hat(w - nu2) dw / (2 pi)."""
    nu1 = np.asarray(nu1, dtype=float)
    nu2 = np.asarray(nu2, dtype=float)
    s_minus = nu1 - nu2
    s_plus = nu1 + nu2
    return (
        -(s_minus**2) / (8 * p.sigma**2)
        + math.log(p.eta / math.sqrt(p.width2))
        - (p.Delta + s_plus / 2) ** 2 / (2 * p.width2)
    )


def alpha(nu1, nu2, p: SiteKernelParams):
    return np.exp(log_alpha(nu1, nu2, p))


def g_hat(nu1, nu2, p: SiteKernelParams):
    """Coherent-term coefficient (i/2) tanh(beta (nu1-nu2)/4) alpha(nu1, nu2)."""
    nu1 = np.asarray(nu1, dtype=float)
    nu2 = np.asarray(nu2, dtype=float)
    return 0.5j * np.tanh(p.beta * (nu1 - nu2) / 4) * alpha(nu1, nu2, p)


def alpha_by_quadrature(nu1: float, nu2: float, p: SiteKernelParams) -> float:
    def integrand(w):
        return gamma(w, p) * f_hat(w - nu1, p) * f_hat(w - nu2, p) / (2 * np.pi)

    center = (nu1 + nu2) / 2
    width = 10 * max(p.sigma, p.eta)
    points = sorted({-p.Delta, nu1, nu2, center})
    lo = min(points) - width
    hi = max(points) + width
    val, _ = scipy.integrate.quad(integrand, lo, hi, points=points, limit=400, epsabs=0, epsrel=1e-13)
    return val


# quadrature ----------------------------------------------------------------
@dataclasses.dataclass(frozen=True)
class QuadratureSpec:
    rtol: float = 1e-10
    atol: float = 0.0
    n0: int = 64
    max_points: int = 2**20
    min_levels: int = 3


class QuadratureError(RuntimeError):
    pass


def romberg(fn: Callable[[np.ndarray], np.ndarray], a: float, b: float, spec: QuadratureSpec = QuadratureSpec()):
    """Trapezoid rule on [a, b] with repeated halving and Richardson
    extrapolation.  ``fn`` maps an array of nodes to values with the node
    axis first; extra axes are integrated independently.  Returns the
    value and the last change used as an error estimate."""
    n = spec.n0
    h = (b - a) / n
    y = np.asarray(fn(np.linspace(a, b, n + 1)))
    trap = h * (y.sum(axis=0) - (y[0] + y[-1]) / 2)
    table = [trap]
    level = 0
    while True:
        xm = a + h * (np.arange(n) + 0.5)
        trap = trap / 2 + (h / 2) * np.asarray(fn(xm)).sum(axis=0)
        h /= 2
        n *= 2
        level += 1
        row = [trap]
        for j, prev in enumerate(table, start=1):
            row.append(row[-1] + (row[-1] - prev) / (4**j - 1))
        err = np.max(np.abs(row[-1] - table[-1]))
        table = row
        scale = np.max(np.abs(row[-1]))
        if level >= spec.min_levels and err <= max(spec.atol, spec.rtol * scale):
            return row[-1], float(err)
        if n >= spec.max_points:
            raise QuadratureError(f"no convergence with {n} panels (last change {err:.3e}, scale {scale:.3e})")


# b1 in the time domain -----------------------------------------------------
def _b1_cutoff_u(p: SiteKernelParams, eps: float = 1e-16) -> float:
    # the integrand is bounded by 2 exp(-2 pi u / beta), so the tail beyond U
    # is at most (sigma / pi^2) exp(-2 pi U / beta) = eps * sigma
    return p.beta / (2 * np.pi) * math.log(1 / (np.pi**2 * eps))


def _b1_integrand(u: np.ndarray, t: np.ndarray, p: SiteKernelParams) -> np.ndarray:
    """[exp(-2s^2 (t+u)^2) - exp(-2s^2 (t-u)^2)] / sinh(2 pi u / beta) for t, u >= 0,
    shape (len(u), len(t))."""
    s2 = p.sigma**2
    U = u[:, None]
    T = t[None, :]
    x = 2 * np.pi * U / p.beta
    with np.errstate(invalid="ignore", divide="ignore"):
        num = np.exp(-2 * s2 * (T - U) ** 2) * np.expm1(-8 * s2 * T * U)
        den = np.where(x < 1e-4, x * (1 + x**2 / 6), np.sinh(x))
        out = num / den
    limit = -8 * s2 * T * np.exp(-2 * s2 * T**2) * p.beta / (2 * np.pi)
    return np.where(U == 0, limit, out)


def b1(t, p: SiteKernelParams, spec: QuadratureSpec | None = None, chunk: int = 256):
    """b1(t) = sigma/(pi beta) int_0^inf [e^{-2s^2(t+u)^2} - e^{-2s^2(t-u)^2}] / sinh(2 pi u/beta) du."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    spec = spec or QuadratureSpec(rtol=1e-12, atol=1e-15 * p.sigma, min_levels=2)
    U = _b1_cutoff_u(p)
    n0 = max(spec.n0, int(2 ** math.ceil(math.log2(max(1.0, U * p.sigma)))))
    spec = dataclasses.replace(spec, n0=n0)
    at = np.abs(t)
    out = np.empty_like(at)
    for k in range(0, at.size, chunk):
        block = at[k : k + chunk]
        val, _ = romberg(lambda u: _b1_integrand(u, block, p), 0.0, U, spec)
        out[k : k + chunk] = val
    return np.sign(t) * out * p.sigma / (np.pi * p.beta)


@functools.lru_cache(maxsize=64)
def b1_time_cutoff(p: SiteKernelParams, tol: float = 1e-14) -> float:
    """Time beyond which |b1| is below ``tol`` times its peak scale."""
    T = max(8 / p.sigma, p.beta / np.pi)
    peak = np.abs(b1(np.linspace(0, 4 / p.sigma, 33), p)).max()
    while abs(b1(T, p)[0]) * max(1.0, T) ** 4 > tol * peak:
        T *= 1.5
    return T


# moments -------------------------------------------------------------------
def b2_moment(r: int, p: SiteKernelParams) -> float:
    """Exact int |b2(t)| |t|^r dt."""
    return 2.0**-r * p.eta * (p.beta / p.Delta) ** ((r + 1) / 2) * math.gamma((r + 1) / 2)


def b2_moment_quadrature(r: int, p: SiteKernelParams) -> float:
    a = 4 * p.Delta / p.beta
    T = math.sqrt((40 + r * math.log(1 + r)) / a) * 1.5
    val, _ = romberg(lambda t: 2 * p.eta * np.exp(-a * t**2) * t**r, 0.0, T, QuadratureSpec(rtol=1e-13))
    return 2 * float(val)


def b1_moment_bound(r: int, p: SiteKernelParams) -> float:
    if r == 0:
        return (2 / math.sqrt(math.pi) + math.log(1 + math.sqrt(2) / math.pi * p.sigma * p.beta)) / (
            math.sqrt(2) * math.pi**1.5
        )
    return 2 ** ((r + 5) / 2) * math.factorial(r) / math.pi**1.5 * (1 / p.sigma + p.beta / math.pi) ** r


def b1_moments(p: SiteKernelParams, r_max: int = 4, T: float | None = None) -> np.ndarray:
    """int |b1(t)| |t|^r dt for r = 0..r_max, by quadrature (b1 is odd and
    non-positive for t > 0)."""
    return _b1_moments_cached(p, int(r_max), T).copy()


@functools.lru_cache(maxsize=64)
def _b1_moments_cached(p: SiteKernelParams, r_max: int, T: float | None) -> np.ndarray:
    T = b1_time_cutoff(p) if T is None else T
    n0 = int(2 ** math.ceil(math.log2(max(64.0, T * p.sigma))))
    r = np.arange(r_max + 1)
    spec = QuadratureSpec(rtol=1e-11, n0=n0, min_levels=2)
    val, _ = romberg(lambda t: np.abs(b1(t, p))[:, None] * t[:, None] ** r, 0.0, T, spec)
    return 2 * np.asarray(val, dtype=float)


def b1_moment(r: int, p: SiteKernelParams, T: float | None = None) -> float:
    return float(b1_moments(p, max(r, 4), T)[r])


def b1_l1_norm_oracle(p: SiteKernelParams) -> float:
    """int |b1| dt via the one-dimensional form (1/(sqrt(2) pi^{3/2})) int_0^inf erf(a x)/sinh(x) dx,
    a = sigma beta / (sqrt(2) pi)."""
    a = p.sigma * p.beta / (math.sqrt(2) * math.pi)

    def integrand(x):
        if x < 1e-8:
            return 2 * a / math.sqrt(math.pi)
        return math.erf(a * x) / math.sinh(x)

    val, _ = scipy.integrate.quad(integrand, 0, 60, limit=400, epsabs=0, epsrel=1e-13)
    return val / (math.sqrt(2) * math.pi**1.5)


@dataclasses.dataclass(frozen=True)
class MomentReport:
    kernel: str
    r: int
    value: float
    bound: float

    @property
    def margin(self) -> float:
        return self.bound - self.value

    @property
    def passed(self) -> bool:
        if self.kernel == "b2":
            return abs(self.value - self.bound) <= 1e-8 * self.bound
        return self.value <= self.bound


def moment_check(kernel: str, r: int, p: SiteKernelParams) -> MomentReport:
    """b2: quadrature against the exact moment; b1: quadrature against the upper bound."""
    if kernel == "b2":
        return MomentReport("b2", r, b2_moment_quadrature(r, p), b2_moment(r, p))
    if kernel == "b1":
        return MomentReport("b1", r, b1_moment(r, p), b1_moment_bound(r, p))
    raise ValueError(f"unknown kernel {kernel!r}")


# Fourier consistency -----------------------------------------------------------
def b2_hat_by_quadrature(omega: Sequence[float], p: SiteKernelParams) -> np.ndarray:
    omega = np.asarray(omega, dtype=float)
    a = 4 * p.Delta / p.beta
    T = math.sqrt(40 / a)
    n0 = int(2 ** math.ceil(math.log2(64 + T * (2 * p.Delta + np.abs(omega).max()))))
    val, _ = romberg(
        lambda t: b2(t, p)[:, None] * np.exp(-1j * np.outer(t, omega)), -T, T, QuadratureSpec(rtol=1e-12, n0=n0)
    )
    return val


def b1_hat_by_quadrature(omega: Sequence[float], p: SiteKernelParams) -> np.ndarray:
    """-2i int_0^inf b1(t) sin(w t) dt, using odd symmetry of b1."""
    omega = np.asarray(omega, dtype=float)
    T = b1_time_cutoff(p)
    n0 = int(2 ** math.ceil(math.log2(max(64.0, 2 * T * (p.sigma + np.abs(omega).max())))))
    val, _ = romberg(
        lambda t: b1(t, p)[:, None] * np.sin(np.outer(t, omega)), 0.0, T, QuadratureSpec(rtol=1e-11, n0=n0)
    )
    return -2j * val


def fourier_consistency_check(kernel: str, omega: Sequence[float], p: SiteKernelParams) -> float:
    """Largest |quadrature - closed form| over ``omega``."""
    if kernel == "b1":
        return float(np.abs(b1_hat_by_quadrature(omega, p) - b1_hat(omega, p)).max())
    if kernel == "b2":
        return float(np.abs(b2_hat_by_quadrature(omega, p) - b2_hat(omega, p)).max())
    if kernel == "f":
        omega = np.asarray(omega, dtype=float)
        T = 8 / p.sigma
        val, _ = romberg(
            lambda t: f_time(t, p)[:, None] * np.exp(-1j * np.outer(t, omega)), -T, T, QuadratureSpec(rtol=1e-13)
        )
        return float(np.abs(val - f_hat(omega, p)).max())
    raise ValueError(f"unknown kernel {kernel!r}")
