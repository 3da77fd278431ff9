"""Command-line front end.

Every subcommand writes a JSON report (plus CSV tables next to it) and
exits 0 when all asserted checks pass, 1 when one fails and 2 on a usage
or spec-parse error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from . import dobrushin, kernels, lindbladian, quasilocality, refrigeration, separability, suite
from . import hamiltonian as ham
from .hamiltonian import LocalHamiltonian, SpecError
from .kernels import SiteKernelParams
from .qop import PAULI, gibbs_state, random_pure_state
from .report import ExperimentReport, check, make_rng

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


# argument helpers ---------------------------------------------------------------
def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _tolerances(text: str | None) -> dict[str, float]:
    """``key=value,key=value`` or the path of a JSON object."""
    if not text:
        return {}
    path = Path(text)
    if path.is_file():
        try:
            obj = json.loads(path.read_text())
        except json.JSONDecodeError as err:
            raise UsageError(f"--tol-overrides {path}: {err}") from None
        if not isinstance(obj, dict):
            raise UsageError(f"--tol-overrides {path}: expected a JSON object")
        items = obj.items()
    else:
        items = []
        for part in text.split(","):
            if "=" not in part:
                raise UsageError(f"--tol-overrides: cannot parse {part!r}, expected key=value")
            k, v = part.split("=", 1)
            items.append((k.strip(), v))
    out = {}
    for k, v in items:
        if k not in suite.TOLERANCES:
            raise UsageError(f"--tol-overrides: unknown tolerance {k!r}; known: {', '.join(sorted(suite.TOLERANCES))}")
        try:
            out[k] = float(v)
        except (TypeError, ValueError):
            raise UsageError(f"--tol-overrides: {k} must be a number") from None
    return out


def _jobs(args) -> int:
    if args.jobs is not None:
        return max(1, args.jobs)
    env = os.environ.get("GIBBSLAB_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise UsageError(f"GIBBSLAB_JOBS must be an integer, got {env!r}") from None
    return 1


def _pool_map(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))


def _load_spec(args, min_support: int = 2) -> LocalHamiltonian:
    if not args.spec:
        raise UsageError("--spec is required")
    path = Path(args.spec)
    if not path.is_file():
        raise UsageError(f"--spec {path}: no such file")
    try:
        return ham.load(path, min_support=min_support)
    except SpecError as err:
        raise SpecError(f"{path}:{err.path}", err.msg) from None


def _site_params(args, H: LocalHamiltonian, beta: float) -> list[SiteKernelParams] | None:
    """Optional per-site (Delta, sigma, eta) overrides from a JSON list."""
    if not args.params:
        return None
    path = Path(args.params)
    try:
        rows = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as err:
        raise UsageError(f"--params {path}: {err}") from None
    if not isinstance(rows, list) or len(rows) != H.n:
        raise UsageError(f"--params {path}: expected a list of {H.n} [Delta, sigma, eta] triples")
    out = []
    for i, row in enumerate(rows):
        if not (isinstance(row, list) and len(row) == 3):
            raise UsageError(f"--params {path}[{i}]: expected [Delta, sigma, eta]")
        try:
            out.append(SiteKernelParams(beta, float(row[0]), float(row[1]), float(row[2])))
        except (kernels.ParameterError, TypeError, ValueError) as err:
            raise UsageError(f"--params {path}[{i}]: {err}") from None
    return out


def with_z_field(H: LocalHamiltonian, h: float) -> LocalHamiltonian:
    """Replace the field by (h/2) sigma_Z on every site."""
    return LocalHamiltonian.build(H.n, list(H.terms), ham.z_field(h, H.n))


def _one(values: list[float] | None, name: str) -> float:
    if not values:
        raise UsageError(f"--{name} is required")
    if len(values) != 1:
        raise UsageError(f"--{name} takes a single value here")
    return values[0]


# subcommands ----------------------------------------------------------------------
def cmd_build(args, rep: ExperimentReport, tol: dict) -> None:
    H = _load_spec(args)
    beta = _one(args.beta, "beta")
    params = _site_params(args, H, beta)
    L = lindbladian.lindbladian(H, beta, params, radius=args.radius)
    trace_defect = np.abs(L.adjoint()(np.eye(2**H.n))).max()
    rep.results.update(
        n=H.n, locality=H.locality, degree=H.degree, zeta=H.zeta, field_norm=H.field_norm,
        superoperator_dim=L.dim,
        params=[dict(Delta=p.Delta, sigma=p.sigma, eta=p.eta) for p in (params or kernels.field_resonant_params(H, beta))],
    )
    rep.checks.append(check("trace_preservation", trace_defect, "<=", 1e-10, beta=beta, radius=args.radius))


def cmd_check_db(args, rep: ExperimentReport, tol: dict) -> None:
    H = _load_spec(args)
    beta = _one(args.beta, "beta")
    params = _site_params(args, H, beta)
    rep.checks.append(check("db_defect", lindbladian.db_defect_spectral(H, beta, params), "<=", tol["db_defect"], beta=beta))
    rep.checks.append(check("fixed_point", lindbladian.fixed_point_defect_spectral(H, beta, params), "<=", tol["fixed_point"], beta=beta))
    L = lindbladian.lindbladian(H, beta, params)
    sigma = gibbs_state(H.dense, beta)
    try:
        rep.results["db_defect_dense"] = lindbladian.db_defect(L, sigma)
    except lindbladian.IllConditionedError as err:
        rep.results["db_defect_dense"] = None
        rep.results["db_defect_dense_skipped"] = str(err)
    rep.results["fixed_point_dense"] = lindbladian.fixed_point_defect(L, sigma)


def cmd_mix(args, rep: ExperimentReport, tol: dict) -> None:
    H = _load_spec(args)
    beta = _one(args.beta, "beta")
    eps = args.eps if args.eps is not None else tol["mixing_target"]
    params = _site_params(args, H, beta)
    L = lindbladian.lindbladian(H, beta, params)
    sigma = gibbs_state(H.dense, beta)
    gap = lindbladian.spectral_gap(L)
    psi = random_pure_state(2**H.n, make_rng(args.seed, 0))
    grid, curve = suite.mixing_curve_to_target(L, np.outer(psi, psi.conj()), sigma, max(gap, 1e-6), eps)
    rep.results.update(gap=gap, t_end=grid[-1], eps=eps)
    rep.tables["curve"] = [dict(t=t, trace_distance=d) for t, d in zip(grid, curve)]
    rep.checks.append(check("spectral_gap_positive", gap, ">=", 1e-12, beta=beta))
    rep.checks.append(check("mixing_final_distance", curve[-1], "<=", eps, beta=beta, t_end=grid[-1]))
    rep.checks.append(check("mixing_monotone", np.max(np.diff(curve)), "<=", tol["monotone_slack"], beta=beta))


def cmd_lr_shells(args, rep: ExperimentReport, tol: dict) -> None:
    H0 = _load_spec(args)
    hs = args.h if args.h else [None]
    rows = []
    for h in hs:
        H = H0 if h is None else with_z_field(H0, h)
        for t in args.t:
            shells, report = quasilocality.heisenberg_shells(H, PAULI[args.pauli], args.site, t, args.r_max)
            for s in report:
                rows.append(dict(h=h, t=t, r=s.r, norm=s.norm, bound=s.bound))
                rep.checks.append(check("shell_norm", s.norm, "<=", s.bound * (1 + 1e-12), h=h, t=t, r=s.r))
    rep.tables["shells"] = rows


def _kernel_point(point: tuple[float, float, float]) -> dict[str, Any]:
    beta, gap, rtol = point
    p = SiteKernelParams.resonant(beta, gap)
    row: dict[str, Any] = dict(beta=beta, gap=gap, Delta=p.Delta, sigma=p.sigma, eta=p.eta)
    b1m = kernels.b1_moments(p, 4)
    for r in range(5):
        exact, quad = kernels.b2_moment(r, p), kernels.b2_moment_quadrature(r, p)
        bound = kernels.b1_moment_bound(r, p)
        row.update({
            f"b2_moment{r}_closed": exact, f"b2_moment{r}_quadrature": quad,
            f"b2_moment{r}_rel_err": abs(quad - exact) / exact,
            f"b1_moment{r}": b1m[r], f"b1_moment{r}_bound": bound, f"b1_moment{r}_margin": bound - b1m[r],
        })
    row["b1_l1_oracle"] = kernels.b1_l1_norm_oracle(p)
    row["b1_hat_err"] = kernels.fourier_consistency_check("b1", p.sigma * np.array([-4, -1, 0, 1, 4]), p)
    row["b2_hat_err"] = kernels.fourier_consistency_check("b2", -2 * p.Delta + p.sigma * np.array([-8, -1, 0, 1, 8]), p)
    row["tol"] = rtol
    return row


def cmd_kernels(args, rep: ExperimentReport, tol: dict) -> None:
    betas = args.beta or [0.01, 0.05, 0.1]
    gaps = args.h or [0.0]
    points = [(b, g, tol["b2_moment_rel"]) for b in betas for g in gaps]
    rows = _pool_map(_kernel_point, points, _jobs(args))
    for row in rows:
        inputs = dict(beta=row["beta"], gap=row["gap"])
        for r in range(5):
            rep.checks.append(check("b2_moment", row[f"b2_moment{r}_rel_err"], "<=", tol["b2_moment_rel"], r=r, **inputs))
            rep.checks.append(check("b1_moment_bound", row[f"b1_moment{r}"], "<=", row[f"b1_moment{r}_bound"], r=r, **inputs))
        rep.checks.append(check("b1_hat_quadrature", row["b1_hat_err"], "<=", tol["fourier"], **inputs))
        rep.checks.append(check("b2_hat_quadrature", row["b2_hat_err"], "<=", tol["fourier"], **inputs))
    rep.tables["kernels"] = rows


def cmd_contraction(args, rep: ExperimentReport, tol: dict) -> None:
    beta = _one(args.beta, "beta")
    delta = args.delta if args.delta is not None else dobrushin.DELTA_MAX
    hs = args.h or list(np.logspace(-3, 5, 17) / beta)
    rng = make_rng(args.seed, 7)
    rows = []
    for h in hs:
        p = SiteKernelParams.resonant(beta, h)
        ov = dobrushin.overlap_integrals(h, p)
        X = suite._traceless_first_site(2, rng)
        res = dobrushin.local_dissipative_contraction(h, beta, delta, X, p)
        ok_b = ov.b2 >= dobrushin.C_DIAG - 1e-15
        rows.append(dict(
            h=h, a2=ov.a2, b2=ov.b2, c2=ov.c2, xy_sector=ov.xy_sector, z_sector=ov.z_sector,
            ratio=res.ratio, guaranteed=res.guaranteed, b_floor_pass=ok_b, contraction_pass=res.passed,
        ))
        rep.checks.append(check("b_overlap_floor", ov.b2, ">=", dobrushin.C_DIAG - 1e-15, beta=beta, h=h))
        rep.checks.append(check("channel_contraction", res.ratio, "<=", res.guaranteed + 1e-12, beta=beta, h=h, delta=delta))
    rep.tables["contraction"] = rows


def cmd_clusters(args, rep: ExperimentReport, tol: dict) -> None:
    H = _load_spec(args)
    if args.h:
        H = with_z_field(H, 2 * _one(args.h, "h"))
    beta = _one(args.beta, "beta")
    origin = args.origin
    if not 0 <= origin < H.n:
        raise UsageError(f"--origin must lie in [0, {H.n})")
    D, L = max(H.degree, 1), max(H.locality, 1)
    counts = separability.cluster_counts(H, origin, args.k_max)
    rows = []
    for k, c in enumerate(counts, start=1):
        cap = separability.cluster_count_cap(k, D, L)
        rows.append(dict(k=k, count=c, cap=cap, coeff_bound=separability.cluster_coeff_bound(k, beta, H.field_norm, L)))
        rep.checks.append(check("cluster_count_cap", c, "<=", cap, k=k))
    rep.tables["clusters"] = rows
    regimes = dict(
        araki=separability.araki_regime(beta, H.field_norm, D, L),
        separability=separability.separability_regime(beta, H.field_norm, D, L),
        geometric_cluster=separability.geometric_cluster_regime(beta, H.field_norm, D, L),
    )
    rep.results.update(counts=counts, regimes=regimes, field_norm=H.field_norm, degree=D, locality=L)
    if H.n <= 10:
        araki = separability.araki_check(H, beta, origin)
        rep.results.update(deviation=araki.deviation, aggregate_bound=araki.aggregate_bound)
        if regimes["araki"]:
            rep.checks.append(check("araki_deviation", araki.deviation, "<=", araki.aggregate_bound, origin=origin, beta=beta))


def cmd_refrigerate(args, rep: ExperimentReport, tol: dict) -> None:
    H_C = _load_spec(args, min_support=1)
    try:
        refrigeration.validate_commuting_projectors(H_C)
    except refrigeration.NotCommutingProjectorsError as err:
        raise SpecError(str(args.spec), str(err)) from None
    beta = _one(args.beta, "beta")
    if args.regime:
        t, h = refrigeration.choose_params(beta, args.regime)
    else:
        if args.t_ancillas is None or not args.h:
            raise UsageError("give --regime, or both --ancillas and --h")
        t, h = args.t_ancillas, _one(args.h, "h")
    b_eff = refrigeration.beta_eff(beta, h, t)
    rep.results.update(t=t, h=h, beta_eff=b_eff, locality=H_C.locality + 1, degree=H_C.degree * t + 1)
    if H_C.n + len(H_C.terms) * t <= 12:
        res = refrigeration.verify_marginal(H_C, beta, h, t)
        rep.results["marginal_distance"] = res.distance
        rep.checks.append(check("marginal_distance", res.distance, "<=", tol["marginal"], beta=beta, h=h, t=t))
    else:
        rep.results["marginal_distance"] = None
    if H_C.n <= 4:
        dist = refrigeration.computational_distribution(H_C, b_eff)
        rep.tables["histogram"] = [dict(x=format(i, f"0{H_C.n}b"), p=float(q)) for i, q in enumerate(dist)]


def _criterion_job(item: tuple[int, int, dict]):
    idx, seed, tol = item
    recs, sec = suite.run_criterion(idx, seed, tol)
    return idx, recs, sec


def cmd_suite(args, rep: ExperimentReport, tol: dict) -> None:
    idxs = args.criteria or sorted(suite.CRITERIA)
    for i in idxs:
        if i not in suite.CRITERIA:
            raise UsageError(f"unknown criterion {i}")
    results = _pool_map(_criterion_job, [(i, args.seed, tol) for i in idxs], _jobs(args))
    rows = []
    for idx, recs, sec in results:
        line = suite.summary_line(idx, recs, sec)
        print(line)
        rep.checks.extend(recs)
        rep.checks.append(check("runtime_budget", sec, "<=", suite.RUNTIME_BUDGET[idx], criterion=idx))
        rep.wall_times[f"criterion_{idx}"] = sec
        rows.append(dict(criterion=idx, title=suite.CRITERIA[idx][0], checks=len(recs),
                         failed=sum(not r.passed for r in recs), seconds=sec))
    rep.tables["criteria"] = rows


COMMANDS: dict[str, Callable] = {
    "build": cmd_build,
    "check-db": cmd_check_db,
    "mix": cmd_mix,
    "lr-shells": cmd_lr_shells,
    "kernels": cmd_kernels,
    "contraction": cmd_contraction,
    "clusters": cmd_clusters,
    "refrigerate": cmd_refrigerate,
    "suite": cmd_suite,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="Hamiltonian spec (JSON)")
    common.add_argument("--beta", type=_floats, help="inverse temperature, or a comma-separated grid")
    common.add_argument("--h", type=_floats, help="field strength, or a comma-separated grid")
    common.add_argument("--delta", type=float, help="channel step size")
    common.add_argument("--eps", type=float, help="target trace distance")
    common.add_argument("--radius", type=float, help="truncation radius of each local generator")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--jobs", type=int, help="worker processes (default: $GIBBSLAB_JOBS or 1)")
    common.add_argument("--out", help="report path (JSON); CSV tables go next to it")
    common.add_argument("--tol-overrides", help="key=value,... or a JSON file")

    parser = argparse.ArgumentParser(prog="gibbslab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        if name in ("build", "check-db", "mix"):
            sp.add_argument("--params", help="JSON list of per-site [Delta, sigma, eta]")
        if name == "lr-shells":
            sp.add_argument("--t", type=_floats, default=[0.05, 0.1, 0.2])
            sp.add_argument("--site", type=int, default=0)
            sp.add_argument("--pauli", choices=["X", "Y", "Z"], default="X")
            sp.add_argument("--r-max", type=int, default=5)
        if name == "clusters":
            sp.add_argument("--origin", type=int, default=0)
            sp.add_argument("--k-max", type=int, default=6)
        if name == "refrigerate":
            sp.add_argument("--ancillas", dest="t_ancillas", type=int, help="ancillas per projector")
            sp.add_argument("--regime", choices=["case1", "case2"])
        if name == "suite":
            sp.add_argument("--criteria", type=lambda s: [int(x) for x in s.split(",")], help="subset, e.g. 1,3,7")
    return parser


def _config(args) -> dict[str, Any]:
    return {k: v for k, v in vars(args).items() if k != "jobs"}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return EXIT_USAGE if err.code else EXIT_OK
    rep = ExperimentReport(args.command, _config(args))
    try:
        tol = suite._tol(_tolerances(args.tol_overrides))
        t0 = time.perf_counter()
        COMMANDS[args.command](args, rep, tol)
        rep.wall_times["total"] = time.perf_counter() - t0
    except SpecError as err:
        print(f"gibbslab: spec error at {err.path}: {err.msg}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ValueError, MemoryError) as err:
        print(f"gibbslab: {err}", file=sys.stderr)
        return EXIT_USAGE
    out = args.out or f"gibbslab-{args.command}.json"
    rep.write(out)
    failed = [c for c in rep.checks if not c.passed]
    status = "FAIL" if failed else "PASS"
    print(f"{status}: {len(rep.checks) - len(failed)}/{len(rep.checks)} checks passed; report {out}")
    return EXIT_FAIL if failed else EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
