"""Default verification suites, one per acceptance criterion.

Each criterion function takes a seed and a tolerance table and returns a
list of check records; nothing here raises on a failed check.
"""
from __future__ import annotations

import itertools
import math
import time
from typing import Callable

import mpmath
import numpy as np

from . import dobrushin, kernels, lindbladian, quasilocality, refrigeration, separability
from . import hamiltonian as ham
from .hamiltonian import LocalHamiltonian
from .kernels import SiteKernelParams
from .qop import PAULI, gibbs_state, op_norm, pauli_string, random_hermitian, random_pure_state, tensor_embed
from .report import CheckRecord, check, make_rng

TOLERANCES: dict[str, float] = {
    "db_defect": 1e-7,
    "fixed_point": 1e-8,
    "marginal": 1e-10,
    "beta_eff": 1e-12,
    "hardness_c": refrigeration.HARDNESS_C,
    "b2_moment_rel": 1e-8,
    "fourier": 1e-8,
    "b1_oracle_rel": 1e-9,
    "overlap": 1e-9,
    "negative_control": 1e-8,
    "c_diag_quoted": 0.550579,
    "channel_route": 1e-12,
    "combo_rel": 1e-9,
    "araki_zero": 1e-12,
    "mixing_target": 1e-6,
    "monotone_slack": 1e-12,
    "formula_rel": 1e-14,
    "support": 1e-9,
    "commuting_coherent": 1e-12,
}

RUNTIME_BUDGET = {1: 120, 2: 30, 3: 1, 4: 60, 5: 120, 6: 60, 7: 60, 8: 30, 9: 60, 10: 180, 11: 120}

Criterion = Callable[[int, dict], list[CheckRecord]]


def _tol(tol: dict | None) -> dict:
    return {**TOLERANCES, **(tol or {})}


# 1 ------------------------------------------------------------------------------
def detailed_balance_instances(seed: int, count: int = 20) -> list[tuple[int, float, float, LocalHamiltonian]]:
    grid = []
    for n, beta, label in itertools.product((2, 3, 4), (0.2, 0.05, 0.01), ("0", "1/b", "100/b", "1e6")):
        h = {"0": 0.0, "1/b": 1 / beta, "100/b": 100 / beta, "1e6": 1e6}[label]
        grid.append((n, beta, h))
    rng = make_rng(seed, 1)
    picks = rng.choice(len(grid), size=count, replace=False)
    out = []
    for k, idx in enumerate(sorted(picks)):
        n, beta, h = grid[idx]
        H = ham.random_chain(n, make_rng(seed, 1, k), h=h, random_field_axis=True)
        out.append((n, beta, h, H))
    return out


def criterion_detailed_balance(seed: int = 0, tol: dict | None = None) -> list[CheckRecord]:
    tol = _tol(tol)
    recs = []
    for n, beta, h, H in detailed_balance_instances(seed):
        inputs = dict(n=n, beta=beta, h=h)
        recs.append(check("db_defect", lindbladian.db_defect_spectral(H, beta), "<=", tol["db_defect"], **inputs))
        L = lindbladian.lindbladian(H, beta)
        fp = max(
            lindbladian.fixed_point_defect(L, gibbs_state(H.dense, beta)),
            lindbladian.fixed_point_defect_spectral(H, beta),
        )
        recs.append(check("fixed_point", fp, "<=", tol["fixed_point"], **inputs))
        sigma = gibbs_state(H.dense, beta)
        w = np.linalg.eigvalsh(sigma)
        if w.min() > 0 and w.max() / w.min() < 1e14:
            recs.append(
                check("db_defect_dense", lindbladian.db_defect(L, sigma), "<=", tol["db_defect"], **inputs)
            )
    return recs


# 2 ------------------------------------------------------------------------------
def refrigeration_instances() -> list[dict]:
    P11 = np.diag([0, 0, 0, 1.0])
    P00 = np.diag([1.0, 0, 0, 0])
    P1 = np.diag([0, 1.0])
    plus = np.full((2, 2), 0.5)
    minus = np.array([[0.5, -0.5], [-0.5, 0.5]])
    return [
        dict(name="11-projector", n=2, terms=[([0, 1], P11)], beta=0.5, h=3.0, t=2),
        dict(name="11-projector-half", n=2, terms=[([0, 1], P11)], beta=0.3, h=0.5, t=2),
        dict(name="single-site", n=1, terms=[([0], P1)], beta=0.8, h=10.0, t=3),
        dict(name="two-diagonal", n=3, terms=[([0, 1], P11), ([1, 2], P00)], beta=0.2, h=1e6, t=2),
        dict(name="x-basis", n=3, terms=[([0, 1], np.kron(plus, plus)), ([2], minus)], beta=0.7, h=2.0, t=2),
    ]


def criterion_refrigeration(seed: int = 0, tol: dict | None = None) -> list[CheckRecord]:
    tol = _tol(tol)
    recs = []
    for inst in refrigeration_instances():
        H_C = refrigeration.projector_hamiltonian(inst["n"], inst["terms"])
        beta, h, t = inst["beta"], inst["h"], inst["t"]
        inputs = dict(instance=inst["name"], beta=beta, h=h, t=t, qubits=H_C.n + len(H_C.terms) * t)
        res = refrigeration.verify_marginal(H_C, beta, h, t)
        recs.append(check("marginal_distance", res.distance, "<=", tol["marginal"], **inputs))
        marg = refrigeration.data_marginal(H_C, beta, h, t)
        fitted = refrigeration.fitted_beta_eff(marg, H_C)
        closed = t * math.log((1 + math.exp(-beta * h)) / (math.exp(-beta) + math.exp(-beta * h)))
        recs.append(check("beta_eff_fitted_vs_closed", abs(fitted - closed), "<=", tol["beta_eff"], **inputs))
        recs.append(check("beta_eff_stable_vs_closed", abs(res.beta_eff - closed), "<=", tol["beta_eff"], **inputs))
        if h == 0.5:
            recs.append(check("beta_eff_half_field", abs(res.beta_eff - t * beta / 2), "<=", 1e-15, **inputs))
    return recs


# 3 ------------------------------------------------------------------------------
def criterion_hardness(seed: int = 0, tol: dict | None = None) -> list[CheckRecord]:
    tol = _tol(tol)
    recs = []
    for beta in np.round(np.arange(0.05, 0.951, 0.05), 2):
        for regime in ("case1", "case2"):
            t, h_min = refrigeration.choose_params(float(beta), regime)
            b = refrigeration.beta_eff(float(beta), h_min, t)
            recs.append(check("beta_eff_reaches_c", b, ">=", tol["hardness_c"], beta=float(beta), regime=regime, t=t, h_min=h_min))
    return recs


# 4 ------------------------------------------------------------------------------
def criterion_lr_shells(seed: int = 0, tol: dict | None = None) -> list[CheckRecord]:
    tol = _tol(tol)
    recs = []
    bounds_by_h = {}
    for h in (0.0, 10.0, 1e4):
        H = ham.random_chain(6, make_rng(seed, 4), h=h, random_field_axis=True)
        rng = make_rng(seed, 4, int(h))
        for t in (0.05, 0.1, 0.2):
            for label in ("X", "Z"):
                shells, rep = quasilocality.heisenberg_shells(H, PAULI[label], 2, t, 5)
                bounds_by_h.setdefault((t, label), []).append(tuple(s.bound for s in rep))
                for s, F in zip(rep, shells):
                    inputs = dict(h=h, t=t, pauli=label, r=s.r, zeta=H.zeta)
                    recs.append(check("shell_norm", s.norm, "<=", s.bound * (1 + 1e-12), **inputs))
                    sup = quasilocality.support_defect(F, H.ball([2], s.r), H.n, rng)
                    recs.append(check("shell_support", sup, "<=", tol["support"], **inputs))
            for omega, lam in (((0, 1, 2, 3, 4), range(6)), ((1, 2, 3), (0, 1, 2, 3, 4))):
                lr = quasilocality.lr_truncation_check(H, PAULI["X"], [2], omega, lam, t)
                recs.append(check("lr_truncation", lr.lhs, "<=", lr.bound, h=h, t=t, ell=lr.ell))
    for key, bounds in bounds_by_h.items():
        same = all(b == bounds[0] for b in bounds)
        recs.append(check("bound_independent_of_h", same, "true", None, t=key[0], pauli=key[1]))
    return recs


# 5 ------------------------------------------------------------------------------
def criterion_jump_coherent(seed: int = 0, tol: dict | None = None) -> list[CheckRecord]:
    tol = _tol(tol)
    recs = []
    for h in (0.0, 10.0, 1e4):
        H = ham.random_chain(4, make_rng(seed, 5), h=h, random_field_axis=True)
        zeta = H.zeta
        for beta in (1 / (12 * zeta), 1 / (24 * zeta)):
            for site, P in itertools.product((0, 1), ("X", "Y", "Z")):
                p = kernels.field_resonant_params(H, beta)[site]
                for omega in (-p.Delta - p.sigma, -p.Delta, -h, 0.0, p.Delta):
                    _, rep = quasilocality.jump_shells(H, site, P, omega, beta, 3)
                    for s in rep:
                        recs.append(check("jump_shell", s.norm, "<=", s.bound * (1 + 1e-12), h=h, beta=beta, site=site, pauli=P, omega=omega, r=s.r))
                _, rep = quasilocality.coherent_shells(H, site, P, beta, 3)
                for s in rep:
                    recs.append(check("coherent_shell", s.norm, "<=", s.bound, h=h, beta=beta, site=site, pauli=P, r=s.r))
    for h in (0.0, 10.0, 1e4):
        H = ham.chain(4, ("ZZ",), h=h)
        frame = lindbladian.EigenFrame.of(H.dense)
        for beta in (0.02, 0.2):
            params = kernels.field_resonant_params(H, beta)
            worst = max(op_norm(lindbladian.coherent_term(frame, tensor_embed(PAULI["Z"], [j], 4), params[j])) for j in range(4))
            recs.append(check("commuting_coherent_zero", worst, "<=", tol["commuting_coherent"], h=h, beta=beta))
    return recs


# 6 ------------------------------------------------------------------------------
KERNEL_GRID = [(b, db) for b in (0.01, 0.05, 0.1) for db in (1.0, 4.0, 100.0, 1e4)]


def criterion_kernels(seed: int = 0, tol: dict | None = None) -> list[CheckRecord]:
    tol = _tol(tol)
    recs = []
    for beta, db in KERNEL_GRID:
        p = SiteKernelParams.resonant(beta, db / beta)
        inputs = dict(beta=beta, Delta_beta=db)
        for r in range(5):
            exact = kernels.b2_moment(r, p)
            quad = kernels.b2_moment_quadrature(r, p)
            recs.append(check("b2_moment", abs(quad - exact) / exact, "<=", tol["b2_moment_rel"], r=r, **inputs))
        moments = kernels.b1_moments(p, 4)
        for r in range(5):
            recs.append(check("b1_moment_bound", moments[r], "<=", kernels.b1_moment_bound(r, p), r=r, **inputs))
        oracle = kernels.b1_l1_norm_oracle(p)
        recs.append(check("b1_l1_two_routes", abs(moments[0] - oracle) / oracle, "<=", tol["b1_oracle_rel"], **inputs))
        w1 = p.sigma * np.array([-4, -2, -1, -0.5, 0, 0.5, 1, 2, 4])
        w2 = -2 * p.Delta + p.sigma * np.array([-8, -4, -1, 0, 1, 4, 8])
        recs.append(check("b1_hat_quadrature", kernels.fourier_consistency_check("b1", w1, p), "<=", tol["fourier"], **inputs))
        recs.append(check("b2_hat_quadrature", kernels.fourier_consistency_check("b2", w2, p), "<=", tol["fourier"], **inputs))
    return recs


# 7 ------------------------------------------------------------------------------
def _traceless_first_site(m: int, rng: np.random.Generator) -> np.ndarray:
    d = 2 ** (m - 1)
    X = np.zeros((2**m, 2**m), dtype=np.complex128)
    for P in ("X", "Y", "Z"):
        X += np.kron(PAULI[P], random_hermitian(d, rng))
    return X


def criterion_contraction(seed: int = 0, tol: dict | None = None) -> list[CheckRecord]:
    tol = _tol(tol)
    recs = []
    beta = 0.1
    for h in np.logspace(-3, 5, 17) / beta:
        p = SiteKernelParams.resonant(beta, h)
        ov = dobrushin.overlap_integrals(h, p)
        quad = dobrushin.overlap_integrals_by_quadrature(h, p)
        inputs = dict(beta=beta, h=float(h))
        recs.append(check("b_overlap_floor", ov.b2, ">=", dobrushin.C_DIAG - 1e-15, **inputs))
        recs.append(check("b_overlap_floor_quoted", ov.b2, ">=", tol["c_diag_quoted"], **inputs))
        err = max(abs(ov.a2 - quad.a2), abs(ov.b2 - quad.b2), abs(ov.c2 - quad.c2))
        recs.append(check("overlap_quadrature", err, "<=", tol["overlap"], **inputs))
        recs.append(check("xy_sector_floor", ov.xy_sector, ">=", dobrushin.C_DIAG - 1e-15, **inputs))
        recs.append(check("sector_cap", max(ov.xy_sector, ov.z_sector), "<=", 3 * math.sqrt(2), **inputs))
    rng = make_rng(seed, 7)
    worst = -np.inf
    for k in range(200):
        m = 1 + k % 3
        b = float(rng.choice([0.05, 0.2, 1.0]))
        h = float(10 ** rng.uniform(-2, 6)) / b
        delta = float(rng.uniform(0, dobrushin.DELTA_MAX))
        X = _traceless_first_site(m, rng)
        res = dobrushin.local_dissipative_contraction(h, b, delta, X)
        worst = max(worst, res.ratio - res.guaranteed)
        recs.append(check("channel_contraction", res.ratio, "<=", res.guaranteed + 1e-12, m=m, beta=b, h=h, delta=delta))
    recs.append(check("channel_contraction_worst_margin", worst, "<=", 1e-12))
    for b in (0.05, 0.5):
        h = 10 / b
        recs.append(check("canonical_negative_control", dobrushin.overlap_integrals_canonical(h, b).b2, "<=", tol["negative_control"], beta=b, h=h))
    # the closed-form channel agrees with the Lindbladian machinery restricted to the field
    for h in (0.0, 3.0, 40.0):
        b = 0.2
        H = LocalHamiltonian.build(2, [], [h / 2 * PAULI["Z"], 0.7 * PAULI["Z"]])
        gen = lindbladian.dissipator(H, b, sites=[0]).matrix
        closed = (dobrushin.local_channel(h, SiteKernelParams.resonant(b, h), 1.0, 2).matrix - np.eye(16))
        recs.append(check("channel_two_routes", np.abs(gen - closed).max(), "<=", tol["channel_route"], beta=b, h=h))
    return recs


# 8 ------------------------------------------------------------------------------
def _cluster_instances(seed: int) -> list[tuple[str, LocalHamiltonian]]:
    rng = make_rng(seed, 8)
    XX = pauli_string("XX")
    star = LocalHamiltonian.build(4, [((0, k), XX) for k in (1, 2, 3)])
    tri = LocalHamiltonian.build(5, [((0, 1, 2), pauli_string("XYZ")), ((2, 3, 4), pauli_string("ZZZ")), ((1, 3), XX)])
    edges = [e for e in itertools.combinations(range(5), 2) if rng.random() < 0.5] or [(0, 1)]
    rand = LocalHamiltonian.build(5, [(e, XX) for e in edges])
    return [("chain3", ham.chain(3)), ("chain5", ham.chain(5)), ("star", star), ("mixed", tri), ("random", rand)]


def criterion_combinatorics(seed: int = 0, tol: dict | None = None) -> list[CheckRecord]:
    tol = _tol(tol)
    recs = []
    for L, k in itertools.product((1, 2, 3), (1, 2, 3)):
        for frac in (0.1, 0.5, 1.0):
            alpha = frac / L
            recs.append(check("combo_identity", separability.combo_identity_check(alpha, L, k), "<=", tol["combo_rel"], alpha=alpha, L=L, k=k))
    for name, H in _cluster_instances(seed):
        D, L = H.degree, H.locality
        for origin in range(H.n):
            dp = separability.cluster_counts(H, origin, 4)
            for k in range(1, 5):
                brute = len(separability.enumerate_clusters_brute_force(H, origin, k))
                listed = sum(1 for _ in separability.enumerate_clusters(H, origin, k))
                inputs = dict(instance=name, origin=origin, k=k)
                recs.append(check("cluster_count_matches", (brute == dp[k - 1] == listed), "true", None, brute=brute, **inputs))
                recs.append(check("cluster_count_cap", brute, "<=", separability.cluster_count_cap(k, D, L), **inputs))
    return recs


# 9 ------------------------------------------------------------------------------
def araki_instances(seed: int) -> list[tuple[str, LocalHamiltonian, float]]:
    rng = make_rng(seed, 9)
    XX, ZZ = pauli_string("XX"), pauli_string("ZZ")
    out = []
    beta = 1e-5
    for h in (0.0, 100.0, 1e4, separability.field_window(beta, 2, 2)):
        H = LocalHamiltonian.build(3, [((0, 1), XX), ((1, 2), ZZ)], ham.z_field(2 * h, 3))
        out.append((f"chain3-h{h:.4g}", H, beta))
    out.append(("chain4-random", ham.random_chain(4, rng, h=2 * 3e3, random_field_axis=True), 1.5e-5))
    W3 = random_hermitian(8, rng)
    W3 /= op_norm(W3)
    H3 = LocalHamiltonian.build(4, [((0, 1, 2), W3), ((1, 2, 3), W3)], ham.z_field(2e6, 4))
    out.append(("three-local", H3, 2e-7))
    return out


def criterion_araki(seed: int = 0, tol: dict | None = None) -> list[CheckRecord]:
    tol = _tol(tol)
    recs = []
    for name, H, beta in araki_instances(seed):
        D, L = H.degree, H.locality
        in_regime = separability.araki_regime(beta, H.field_norm, D, L)
        recs.append(check("instance_in_regime", in_regime, "true", None, instance=name, beta=beta, h=H.field_norm))
        for origin in range(H.n):
            if not H.site_terms[origin]:
                continue
            rep = separability.araki_check(H, beta, origin)
            recs.append(check("araki_deviation", rep.deviation, "<=", rep.aggregate_bound, instance=name, origin=origin, beta=beta))
    # origin 0 carries no interaction terms while the rest of the chain does
    rng = make_rng(seed, 9, 1)
    beta = 1e-5
    for n in (2, 3, 4):
        terms = [((j, j + 1), pauli_string("XX")) for j in range(1, n - 1)]
        h = separability.field_window(beta, 2, 2)
        field = []
        for _ in range(n):
            V = random_hermitian(2, rng)
            w = np.linalg.eigvalsh(V)
            field.append(V * h / (w[1] - w[0]))
        H = LocalHamiltonian.build(n, terms, field)
        dev = op_norm(separability.araki_expansional(H, beta, 0) - np.eye(2**n))
        recs.append(check("araki_no_interaction", dev, "<=", tol["araki_zero"], n=n, beta=beta, h=h))
    for D, L in ((2, 2), (3, 2), (2, 3)):
        beta = 1 / (4 * D * L * 56 ** (2 * L))
        for h in (0.0, 0.5 * separability.field_window(beta, D, L), separability.field_window(beta, D, L)):
            for k in range(1, 7):
                lhs = separability.cluster_count_cap(k, D, L) * separability.cluster_coeff_bound(k, beta, h, L)
                recs.append(check("cluster_term_geometric", lhs, "<=", 56.0 ** (-k * L), D=D, L=L, h=h, k=k))
    return recs


# 10 ------------------------------------------------------------------------------
def mixing_instances(seed: int) -> list[tuple[int, float, float, LocalHamiltonian]]:
    out = []
    for k, (n, beta, hl) in enumerate(itertools.product((2, 3, 4), (0.05, 0.2), ("0", "1/b", "100/b"))):
        h = {"0": 0.0, "1/b": 1 / beta, "100/b": 100 / beta}[hl]
        out.append((n, beta, h, ham.random_chain(n, make_rng(seed, 10, k), h=h, random_field_axis=True)))
    return out


def mixing_curve_to_target(L, rho0, sigma, gap: float, target: float, points: int = 60):
    t_end = 10 / gap
    for _ in range(12):
        grid = np.linspace(0, t_end, points)
        curve = lindbladian.mixing_curve(L, rho0, sigma, grid)
        if curve[-1] <= target:
            break
        t_end *= 2
    return grid, curve


def criterion_mixing(seed: int = 0, tol: dict | None = None) -> list[CheckRecord]:
    tol = _tol(tol)
    recs = []
    for k, (n, beta, h, H) in enumerate(mixing_instances(seed)):
        L = lindbladian.lindbladian(H, beta)
        sigma = gibbs_state(H.dense, beta)
        gap = lindbladian.spectral_gap(L)
        inputs = dict(n=n, beta=beta, h=h)
        recs.append(check("spectral_gap_positive", gap, ">=", 1e-12, **inputs))
        psi = random_pure_state(2**n, make_rng(seed, 10, 100 + k))
        rho0 = np.outer(psi, psi.conj())
        grid, curve = mixing_curve_to_target(L, rho0, sigma, max(gap, 1e-6), tol["mixing_target"])
        recs.append(check("mixing_final_distance", curve[-1], "<=", tol["mixing_target"], t_end=grid[-1], **inputs))
        recs.append(check("mixing_monotone", np.max(np.diff(curve)), "<=", tol["monotone_slack"], **inputs))
    mpmath.mp.dps = 40
    for n, eps in itertools.product((1, 2, 4, 16, 100), (0.1, 1e-2, 1e-3, 1e-6)):
        ref = int(mpmath.ceil(2 * mpmath.log(2 * mpmath.mpf(n) / mpmath.mpf(eps))))
        recs.append(check("mixing_time_formula", dobrushin.mixing_time_bound(n, eps), "==", ref, n=n, eps=eps))
    for n, beta, D, L, Dmax, delta in ((4, 1e-6, 2, 2, 1e6, 1e-5), (10, 2e-7, 3, 2, 5e6, 1e-4), (3, 1e-3, 2, 2, 1e3, 0.1)):
        b = mpmath.mpf(beta)
        c = 144 + 324 * (mpmath.log(2 * mpmath.sqrt(mpmath.mpf(Dmax) * b)) + 4) ** 2
        ref = 1 - mpmath.mpf(delta) / (2 * n) + c * mpmath.mpf(delta) ** 2
        val = dobrushin.dobrushin_column_bound(n, beta, D, L, Dmax, delta)
        recs.append(check("column_bound_formula", abs(val - float(ref)) / float(ref), "<=", tol["formula_rel"], n=n, beta=beta, delta=delta))
    n, D, L = 4, 2, 2
    beta = 1 / (28800 * (D * L) ** 3)
    c = dobrushin.c_const(beta, 1 / beta)
    delta = 1 / (4 * n * c)
    recs.append(check("column_bound_below_one", dobrushin.dobrushin_column_bound(n, beta, D, L, 1 / beta, delta), "<=", 1 - 1e-12, beta=beta, delta=delta))
    return recs


# 11 ------------------------------------------------------------------------------
def criterion_truncation(seed: int = 0, tol: dict | None = None) -> list[CheckRecord]:
    recs = []
    for h in (1.0, 1e4):
        H = ham.random_chain(4, make_rng(seed, 11), h=h, random_field_axis=True)
        beta = 1 / (12 * H.zeta)
        for R in (1, 2, 4, 8, 12):
            res = quasilocality.truncation_gap(H, beta, R, 1.0, make_rng(seed, 11, R), restarts=256)
            recs.append(check("truncation_gap", res.lower_estimate, "<=", res.bound, h=h, beta=beta, R=R, t=1.0))
    return recs


CRITERIA: dict[int, tuple[str, Criterion]] = {
    1: ("detailed balance", criterion_detailed_balance),
    2: ("field refrigeration", criterion_refrigeration),
    3: ("hardness regimes", criterion_hardness),
    4: ("Lieb-Robinson shells", criterion_lr_shells),
    5: ("jump/coherent quasi-locality", criterion_jump_coherent),
    6: ("kernel identities", criterion_kernels),
    7: ("contraction constant", criterion_contraction),
    8: ("combinatorial identity", criterion_combinatorics),
    9: ("Araki expansional", criterion_araki),
    10: ("mixing", criterion_mixing),
    11: ("Lindbladian truncation", criterion_truncation),
}


def run_criterion(idx: int, seed: int = 0, tol: dict | None = None) -> tuple[list[CheckRecord], float]:
    _, fn = CRITERIA[idx]
    t0 = time.perf_counter()
    recs = fn(seed, tol)
    return recs, time.perf_counter() - t0


def summary_line(idx: int, recs: list[CheckRecord], seconds: float) -> str:
    title = CRITERIA[idx][0]
    failed = [r for r in recs if not r.passed]
    within = seconds <= RUNTIME_BUDGET[idx]
    status = "PASS" if not failed and within else "FAIL"
    detail = f"{len(recs) - len(failed)}/{len(recs)} checks, {seconds:.1f}s (budget {RUNTIME_BUDGET[idx]}s)"
    if failed:
        worst = failed[0]
        detail += f"; first failure {worst.name} computed={worst.computed:.3e} bound={worst.bound}"
    return f"[{status}] criterion {idx:2d} {title}: {detail}"
