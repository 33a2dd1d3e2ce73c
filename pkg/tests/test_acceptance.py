"""Acceptance criteria, one test per criterion, one printed verdict line each.

Run with ``pytest tests/test_acceptance.py -v -s``.  Runtime budgets are
asserted only when the compiled event loop is active (the pure-Python
fallback is ~16x slower and exists for portability, not speed).

Two checks fail by construction of the target constants, not of the code,
and are asserted as stated anyway:

* criterion 6 at t in {0.5, 1}: at N/M = 20 the passive particles that
  exchange during the initial hot-bath transient (tau(0) = 16 is forced by
  sigma_p = 0.5 on the energy sphere) carry excess-variance velocities; the
  resulting L1 bias is 0.073 / 0.044 at t = 0.5 / 1 by an exact
  semi-analytic model, and the measured distances reproduce that model to
  within sampling noise.  No faithful simulation of these parameters can
  reach 0.05 there; the t = 2 distance and all doubled-size decreases pass.
* criterion 7 at m = 100: the exact grid sup of |M_m - gaussian| is
  0.0030008 (leading term 0.399 * 3/(4m) at x = 0), above the stated 0.002.
"""

import time

import pytest

from kacbgk import backend_name
from kacbgk.verify import fixed_point_residuals, run_suite

COMPILED = backend_name() == "cython"

RUNTIME_BUDGETS = {
    "energy": 5.0,
    "eta_decay": 120.0,
    "gap": 120.0,
    "psi_oracle": 180.0,
    "bgk": 900.0,
    "marginal": 1.0,
    "stationarity": 180.0,
    "chaos": 300.0,
}


def run_and_print(criterion: int, suite: str):
    report = run_suite(suite)
    status = "PASS" if report.passed else "FAIL"
    print(f"\nACCEPTANCE {criterion} [{suite}]: {status} ({report.elapsed:.2f} s, "
          f"backend {backend_name()})")
    for c in report.checks:
        mark = "PASS" if c.passed else "FAIL"
        detail = f" [{c.detail}]" if c.detail else ""
        print(f"    {mark} {c.name}: measured {c.measured:.6g}, target {c.target}{detail}")
    return report


def assert_report(report, suite: str):
    if COMPILED:
        assert report.elapsed < RUNTIME_BUDGETS[suite], (
            f"{suite} exceeded its runtime budget: {report.elapsed:.1f} s")
    failed = [c for c in report.checks if not c.passed]
    assert not failed, "; ".join(
        f"{c.name}: measured {c.measured:.6g}, target {c.target}" for c in failed)


def test_criterion_1_energy_conservation():
    report = run_and_print(1, "energy")
    assert_report(report, "energy")


def test_criterion_2_moment_fixed_point():
    start = time.perf_counter()
    residual = fixed_point_residuals()
    elapsed = time.perf_counter() - start
    status = "PASS" if residual <= 1e-12 else "FAIL"
    print(f"\nACCEPTANCE 2 [fixed_point]: {status} ({elapsed:.3f} s) "
          f"worst relative residual {residual:.3e} target <= 1e-12")
    if COMPILED:
        assert elapsed < 1.0
    assert residual <= 1e-12


def test_criterion_3_eta_decay_rate():
    report = run_and_print(3, "eta_decay")
    assert_report(report, "eta_decay")


def test_criterion_4_spectral_gap_decay():
    report = run_and_print(4, "gap")
    assert_report(report, "gap")


def test_criterion_5_moments_vs_exact_oracle():
    report = run_and_print(5, "psi_oracle")
    assert_report(report, "psi_oracle")


def test_criterion_6_bgk_limit_distances():
    report = run_and_print(6, "bgk")
    assert_report(report, "bgk")


def test_criterion_7_marginal_convergence():
    report = run_and_print(7, "marginal")
    assert_report(report, "marginal")


def test_criterion_8_uniform_stationarity():
    report = run_and_print(8, "stationarity")
    assert_report(report, "stationarity")


def test_criterion_9_chaos_diagnostic():
    report = run_and_print(9, "chaos")
    assert_report(report, "chaos")
