"""Acceptance suites: each runs one verification experiment and reports PASS/FAIL checks.

Every suite has a default configuration matching the acceptance criteria;
callers may override individual parameters, in which case targets derived
from the parameters (decay rates, stationary moments) follow along.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .bgk import GaussianDensity, compare_to_limit
from .model import ModelParams, SystemState, kac_eigenfunction
from .moment_ode import moment_matrix, solve_moment_system, stationary_moments
from .observables import empirical_moments, fit_exponential_rate, pair_energy_covariance
from .sampler import InitKind, InitSpec, gaussian_density, marginal_density
from .simulator import Schedule, run_ensemble

__all__ = [
    "Check",
    "SuiteReport",
    "SUITE_NAMES",
    "suite_defaults",
    "run_suite",
    "fixed_point_residuals",
    "MARGINAL_SUP_BASELINES",
]

SUITE_NAMES = ("energy", "stationarity", "eta_decay", "gap", "psi_oracle",
               "bgk", "marginal", "chaos")

# Pre-build grid sup |M_m - gaussian| over x in {-4, -3.9, ..., 4}; the
# regression targets for the marginal suite.
MARGINAL_SUP_BASELINES = {
    10: 0.030820043294327526,
    100: 0.0030008218987734314,
    1000: 0.00029929400707662257,
}

FIXED_POINT_GRID = ((10, 5), (100, 10), (1000, 30), (5000, 70))
FIXED_POINT_LAMBDAS = (0.1, 1.0, 100.0)


@dataclass
class Check:
    name: str
    passed: bool
    measured: float
    target: str
    detail: str = ""


@dataclass
class SuiteReport:
    suite: str
    checks: list[Check] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


_DEFAULTS: dict[str, dict] = {
    "energy": dict(n=100, m=10, lam=1.0, seed=1001, target_events=1_000_000),
    "stationarity": dict(n=100, m=10, lam=1.0, seed=1008, replicas=2000,
                         t_end=2.0, sample_dt=0.5),
    "eta_decay": dict(n=200, m=20, lam=5.0, seed=1003, replicas=2000,
                      sigma_passive=0.8, sigma_active=2.1, t_end=0.5, sample_dt=0.01),
    "gap": dict(n=50, m=10, lam=0.2, seed=1004, replicas=2000,
                t_end=0.8, sample_dt=0.02, disable_exchange=True),
    "psi_oracle": dict(n=200, m=20, lam=5.0, seed=1005, replicas=2000,
                       sigma_passive=0.8, sigma_active=2.1, t_end=1.0, n_times=10),
    "bgk": dict(n=1000, m=50, lam=5.0, seed=1006, replicas=50,
                sigma_passive=0.5, times=(0.5, 1.0, 2.0)),
    "marginal": dict(),
    "chaos": dict(seed=1009, lam=1.0, t=1.0,
                  sizes=((100, 10, 20000), (400, 40, 16000), (1600, 160, 8000))),
}


def suite_defaults(suite: str) -> dict:
    if suite not in _DEFAULTS:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITE_NAMES}")
    return dict(_DEFAULTS[suite])


def run_suite(suite: str, overrides: dict | None = None) -> SuiteReport:
    cfg = suite_defaults(suite)
    for key, val in (overrides or {}).items():
        if key in cfg and val is not None:
            cfg[key] = val
    runner = {
        "energy": _run_energy,
        "stationarity": _run_stationarity,
        "eta_decay": _run_eta_decay,
        "gap": _run_gap,
        "psi_oracle": _run_psi_oracle,
        "bgk": _run_bgk,
        "marginal": _run_marginal,
        "chaos": _run_chaos,
    }[suite]
    start = time.perf_counter()
    report = runner(**cfg)
    report.elapsed = time.perf_counter() - start
    return report


def _run_energy(n, m, lam, seed, target_events) -> SuiteReport:
    """Energy conservation with and without renormalization."""
    params = ModelParams(n_passive=n, n_active=m, lam=lam, seed=seed)
    rate = params.kac_rate + params.exchange_rate
    t_end = target_events / rate
    schedule = Schedule.regular(t_end, t_end / 10.0)
    spec = InitSpec(InitKind.UNIFORM_SPHERE)
    report = SuiteReport("energy")
    for renorm, tol in ((False, 1e-10), (True, 1e-14)):
        ens = run_ensemble(params, spec, schedule, replicas=1, renormalize_state=renorm)
        drift = float(np.max(np.abs(ens.energy / params.n_total - 1.0)))
        label = "renorm_on" if renorm else "renorm_off"
        report.checks.append(Check(
            name=f"energy_drift_{label}", passed=drift <= tol, measured=drift,
            target=f"<= {tol:g}", detail=f"{int(ens.n_events[0])} events"))
    return report


def _run_stationarity(n, m, lam, seed, replicas, t_end, sample_dt) -> SuiteReport:
    """Uniform initial data leaves every moment at its exact sphere value."""
    params = ModelParams(n_passive=n, n_active=m, lam=lam, seed=seed)
    schedule = Schedule.regular(t_end, sample_dt)
    ens = run_ensemble(params, InitSpec(InitKind.UNIFORM_SPHERE), schedule, replicas)
    records = empirical_moments(ens)
    psi_star, xi_star, zeta_star = stationary_moments(n, m)
    targets = {"eta": 0.0, "psi": psi_star, "xi": xi_star, "zeta": zeta_star}
    report = SuiteReport("stationarity")
    for name, target in targets.items():
        z_worst, t_worst = 0.0, 0.0
        for rec in records:
            se = getattr(rec, f"{name}_se")
            z = abs(getattr(rec, name) - target) / se
            if z > z_worst:
                z_worst, t_worst = z, rec.t
        report.checks.append(Check(
            name=f"{name}_stationary", passed=z_worst <= 3.0, measured=z_worst,
            target="max |z| <= 3", detail=f"target {target:.6f}, worst at t={t_worst:g}"))
    return report


def _run_eta_decay(n, m, lam, seed, replicas, sigma_passive, sigma_active,
                   t_end, sample_dt) -> SuiteReport:
    """Fitted decay rate of the mean active-energy excess vs nu = 1 + N/M."""
    params = ModelParams(n_passive=n, n_active=m, lam=lam, seed=seed)
    spec = InitSpec(InitKind.TWO_TEMPERATURE, sigma_passive=sigma_passive,
                    sigma_active=sigma_active)
    schedule = Schedule.regular(t_end, sample_dt)
    ens = run_ensemble(params, spec, schedule, replicas)
    records = empirical_moments(ens)
    report = SuiteReport("eta_decay")
    eta0 = records[0].eta
    report.checks.append(Check(
        name="initial_eta_large_enough", passed=eta0 >= 0.5, measured=eta0,
        target=">= 0.5"))
    rate = fit_exponential_rate([r.t for r in records], [r.eta for r in records],
                                [r.eta_se for r in records])
    nu = params.relaxation_rate
    rel = abs(rate - nu) / nu
    report.checks.append(Check(
        name="eta_decay_rate", passed=rel <= 0.05, measured=rate,
        target=f"{nu:g} within 5%", detail=f"relative error {rel:.4f}"))
    return report


def _gap_initial_state(params: ModelParams) -> SystemState:
    """Deterministic on-sphere state with the quartic eigenfunction far from 0.

    All three stochastic initial families have ensemble-mean phi(0) = 0
    exactly (conditionally on |W| the active part is uniform on its sphere),
    so the gap experiment shares one explicit state across replicas:
    alternating-sign unit passive velocities and all active energy in the
    first coordinate, giving phi(0) = M^2 (M-1) / (M+2).
    """
    n, m = params.n_passive, params.n_active
    v = np.ones(n)
    v[1::2] = -1.0
    w = np.zeros(m)
    w[0] = math.sqrt(m)
    return SystemState(v, w)


def _run_gap(n, m, lam, seed, replicas, t_end, sample_dt, disable_exchange) -> SuiteReport:
    """Pure rotation walk: ensemble-mean phi decays at rate lam * N * gap(M)."""
    if not disable_exchange:
        raise ValueError("gap suite requires disable_exchange "
                         "(the eigenfunction decay rate is a pure-rotation property)")
    params = ModelParams(n_passive=n, n_active=m, lam=lam, seed=seed)
    state0 = _gap_initial_state(params)
    schedule = Schedule.regular(t_end, sample_dt)
    ens = run_ensemble(params, InitSpec(InitKind.UNIFORM_SPHERE), schedule, replicas,
                       disable_exchange=True, initial_state=state0)
    phi_mean = np.mean(ens.phi, axis=0)
    phi_se = np.std(ens.phi, axis=0, ddof=1) / math.sqrt(replicas)
    rate = fit_exponential_rate(ens.times, phi_mean, phi_se)
    target = params.gap_rate
    rel = abs(rate - target) / target
    report = SuiteReport("gap")
    report.checks.append(Check(
        name="phi_initial_nonzero", passed=abs(phi_mean[0]) > 1.0,
        measured=float(phi_mean[0]), target="|phi(0)| > 1"))
    report.checks.append(Check(
        name="gap_decay_rate", passed=rel <= 0.10, measured=rate,
        target=f"{target:g} within 10%", detail=f"relative error {rel:.4f}"))
    return report


def fixed_point_residuals(grid=FIXED_POINT_GRID, lams=FIXED_POINT_LAMBDAS) -> float:
    """Worst relative residual of A Psi* + b1 = 0 over the parameter grid."""
    worst = 0.0
    for (n, m) in grid:
        for lam in lams:
            params = ModelParams(n_passive=n, n_active=m, lam=lam, seed=0)
            sys = moment_matrix(params)
            psi_star, xi_star, zeta_star = stationary_moments(n, m)
            res = sys.a @ np.array([psi_star, xi_star, zeta_star]) + sys.b1
            rel = float(np.max(np.abs(res)) / np.max(np.abs(sys.b1)))
            worst = max(worst, rel)
    return worst


def _run_psi_oracle(n, m, lam, seed, replicas, sigma_passive, sigma_active,
                    t_end, n_times) -> SuiteReport:
    """Empirical second/fourth moments against the exact moment-ODE solution.

    The ODE is started from the ensemble's own t=0 moments, so later times
    test the dynamics alone.
    """
    report = SuiteReport("psi_oracle")
    res = fixed_point_residuals()
    report.checks.append(Check(
        name="fixed_point_residual", passed=res <= 1e-12, measured=res,
        target="<= 1e-12 relative",
        detail=f"grid {FIXED_POINT_GRID} x lambda {FIXED_POINT_LAMBDAS}"))

    params = ModelParams(n_passive=n, n_active=m, lam=lam, seed=seed)
    spec = InitSpec(InitKind.TWO_TEMPERATURE, sigma_passive=sigma_passive,
                    sigma_active=sigma_active)
    times = np.linspace(0.0, t_end, n_times)
    schedule = Schedule(t_end=t_end, sample_times=times)
    ens = run_ensemble(params, spec, schedule, replicas)
    records = empirical_moments(ens)

    sys = moment_matrix(params)
    first = records[0]
    oracle = solve_moment_system(sys, first.psi, first.xi, first.zeta, first.eta,
                                 [r.t for r in records])
    for name in ("psi", "xi", "zeta"):
        worst, t_worst = 0.0, 0.0
        for rec, orc in zip(records, oracle):
            tol = 3.0 * (getattr(rec, f"{name}_se") + 1e-10)
            ratio = abs(getattr(rec, name) - getattr(orc, name)) / tol
            if ratio > worst:
                worst, t_worst = ratio, rec.t
        report.checks.append(Check(
            name=f"{name}_matches_oracle", passed=worst <= 1.0, measured=worst,
            target="max |diff| / (3 (se + 1e-10)) <= 1",
            detail=f"worst at t={t_worst:g}"))
    return report


def _bgk_sigma_active(n: int, m: int, sigma_passive: float) -> float:
    # Pre-projection spreads consistent with the sphere radius (projection
    # scale ~ 1), so the t=0 passive marginal really is N(0, sigma_passive^2).
    return math.sqrt((n + m - sigma_passive**2 * n) / m)


def _run_bgk(n, m, lam, seed, replicas, sigma_passive, times) -> SuiteReport:
    """Pooled passive marginal against the explicit relaxation mixture.

    Also checks that the distance shrinks when (N, M) doubles at fixed N/M.
    """
    report = SuiteReport("bgk")
    f0 = GaussianDensity(sigma_passive)
    distances = {}
    for scale_idx, (nn, mm) in enumerate(((n, m), (2 * n, 2 * m))):
        params = ModelParams(n_passive=nn, n_active=mm, lam=lam, seed=seed + scale_idx)
        spec = InitSpec(InitKind.TWO_TEMPERATURE, sigma_passive=sigma_passive,
                        sigma_active=_bgk_sigma_active(nn, mm, sigma_passive))
        schedule = Schedule(t_end=max(times), sample_times=np.asarray(times, dtype=float))
        ens = run_ensemble(params, spec, schedule, replicas, record_snapshots=True)
        for t in times:
            l1, ks = compare_to_limit(ens, f0, t)
            distances[(scale_idx, t)] = l1
            if scale_idx == 0:
                report.checks.append(Check(
                    name=f"l1_to_mixture_t{t:g}", passed=l1 <= 0.05, measured=l1,
                    target="<= 0.05", detail=f"N={nn}, M={mm}, ks={ks:.4f}"))
    for t in times:
        small, big = distances[(0, t)], distances[(1, t)]
        report.checks.append(Check(
            name=f"l1_decreases_when_doubled_t{t:g}", passed=big < small,
            measured=big, target=f"< {small:.4f} (the (N,M)=({n},{m}) distance)"))
    return report


def _run_marginal() -> SuiteReport:
    """Sphere-marginal convergence to the Gaussian on the reference grid."""
    grid = np.arange(-40, 41) / 10.0
    gauss = gaussian_density(grid)
    sups = {m: float(np.max(np.abs(marginal_density(m, grid) - gauss)))
            for m in (10, 100, 1000)}
    report = SuiteReport("marginal")
    report.checks.append(Check(
        name="sup_monotone_decreasing",
        passed=sups[10] > sups[100] > sups[1000], measured=sups[1000],
        target="sup(10) > sup(100) > sup(1000)",
        detail=f"sups {sups[10]:.6f} > {sups[100]:.6f} > {sups[1000]:.6f}"))
    report.checks.append(Check(
        name="sup_at_m100", passed=sups[100] <= 0.002, measured=sups[100],
        target="<= 0.002",
        detail="exact grid sup at m=100 is 0.0030008 (leading deficit 0.399*3/(4m) "
               "at x=0); the 0.002 bound is unattainable for the exact density"))
    worst = max(abs(sups[m] - MARGINAL_SUP_BASELINES[m]) / MARGINAL_SUP_BASELINES[m]
                for m in sups)
    report.checks.append(Check(
        name="sup_regression_baseline", passed=worst <= 1e-6, measured=worst,
        target="relative drift from recorded baseline <= 1e-6"))
    return report


def _run_chaos(seed, lam, t, sizes) -> SuiteReport:
    """Pair-energy covariance: matches the exact sphere value and shrinks with N."""
    report = SuiteReport("chaos")
    covs = []
    for idx, (n, m, replicas) in enumerate(sizes):
        params = ModelParams(n_passive=n, n_active=m, lam=lam, seed=seed + idx)
        schedule = Schedule(t_end=t, sample_times=np.array([t]))
        ens = run_ensemble(params, InitSpec(InitKind.UNIFORM_SPHERE), schedule,
                           replicas, record_snapshots=True)
        cov, se = pair_energy_covariance(ens, t, return_stderr=True)
        covs.append(cov)
        exact = -2.0 / (n + m + 2.0)
        z = abs(cov - exact) / se
        report.checks.append(Check(
            name=f"cov_matches_sphere_n{n}", passed=z <= 3.0, measured=cov,
            target=f"{exact:.6f} within 3 se", detail=f"z={z:.2f}, se={se:.2e}"))
    decreasing = all(abs(covs[i + 1]) < abs(covs[i]) for i in range(len(covs) - 1))
    report.checks.append(Check(
        name="cov_magnitude_decreasing", passed=decreasing, measured=abs(covs[-1]),
        target="|cov| decreasing across sizes",
        detail=" > ".join(f"{abs(c):.5f}" for c in covs)))
    return report
