import math

import numpy as np
import pytest

from kacbgk import (
    Histogram,
    InitKind,
    InitSpec,
    ModelParams,
    Schedule,
    empirical_moments,
    fit_exponential_rate,
    gaussian_density,
    ks_statistic,
    l1_distance,
    pair_energy_covariance,
    passive_histogram,
    run_ensemble,
    stationary_moments,
)
from kacbgk.simulator import EnsembleResult


@pytest.fixture(scope="module")
def stationary_ensemble():
    params = ModelParams(n_passive=50, n_active=10, lam=1.0, seed=2024)
    sch = Schedule.regular(1.0, 0.25)
    return run_ensemble(params, InitSpec(InitKind.UNIFORM_SPHERE), sch, 600,
                        record_snapshots=True)


def fake_ensemble(v_snapshots, seed=0, n_active=10):
    """EnsembleResult carrying only snapshots, for testing pure statistics."""
    r, s, n = v_snapshots.shape
    params = ModelParams(n_passive=n, n_active=n_active, lam=1.0, seed=seed)
    times = np.arange(s, dtype=float)
    zeros = np.zeros((r, s))
    return EnsembleResult(params=params, schedule=Schedule(t_end=float(s), sample_times=times),
                          replicas=r, disable_exchange=False, disable_kac=False,
                          times=times, tau=zeros, m4_active=zeros, m4_passive=zeros,
                          phi=zeros, energy=zeros, n_events=np.zeros(r, dtype=np.int64),
                          v_snapshots=v_snapshots)


class TestEmpiricalMoments:
    def test_stationary_values(self, stationary_ensemble):
        ens = stationary_ensemble
        n, m = 50, 10
        psi_star, xi_star, _ = stationary_moments(n, m)
        for rec in empirical_moments(ens):
            assert abs(rec.eta) <= 3.0 * rec.eta_se
            assert abs(rec.psi - psi_star) <= 3.0 * rec.psi_se
            assert abs(rec.xi - xi_star) <= 3.0 * rec.xi_se
            assert abs(rec.zeta) <= 3.0 * rec.zeta_se

    def test_jensen(self, stationary_ensemble):
        for rec in empirical_moments(stationary_ensemble):
            assert rec.psi >= rec.eta**2 - 3.0 * (rec.psi_se + rec.eta_se)

    def test_needs_two_replicas(self):
        params = ModelParams(n_passive=20, n_active=5, lam=1.0, seed=1)
        sch = Schedule.regular(0.5, 0.25)
        ens = run_ensemble(params, InitSpec(InitKind.UNIFORM_SPHERE), sch, 1)
        with pytest.raises(ValueError):
            empirical_moments(ens)


class TestPassiveHistogram:
    def test_totals(self, stationary_ensemble):
        hist = passive_histogram(stationary_ensemble, 0.5)
        assert hist.total == 50 * 600
        assert hist.counts.sum() <= hist.total
        assert hist.counts.min() >= 0

    def test_support_within_sphere(self, stationary_ensemble):
        # the sphere radius sqrt(60) bounds every coordinate
        r = math.sqrt(60.0)
        hist = passive_histogram(stationary_ensemble, 1.0, lo=-r, hi=r, bins=40)
        assert hist.counts.sum() == hist.total

    def test_missing_snapshots(self):
        params = ModelParams(n_passive=20, n_active=5, lam=1.0, seed=1)
        sch = Schedule.regular(0.5, 0.25)
        ens = run_ensemble(params, InitSpec(InitKind.UNIFORM_SPHERE), sch, 2)
        with pytest.raises(ValueError):
            passive_histogram(ens, 0.5)

    def test_unknown_time(self, stationary_ensemble):
        with pytest.raises(ValueError):
            passive_histogram(stationary_ensemble, 0.33)

    def test_passive_spike_two_bins(self):
        params = ModelParams(n_passive=40, n_active=8, lam=1.0, seed=3)
        sch = Schedule(t_end=1.0, sample_times=np.array([0.0]))
        ens = run_ensemble(params, InitSpec(InitKind.PASSIVE_SPIKE), sch, 10,
                           record_snapshots=True)
        hist = passive_histogram(ens, 0.0, lo=-2.0, hi=2.0, bins=40)
        assert np.count_nonzero(hist.counts) == 2


class TestL1Distance:
    def test_null_density(self):
        counts = np.array([10, 20, 30, 40], dtype=np.int64)
        hist = Histogram(lo=-1.0, hi=1.0, bins=4, counts=counts, total=100)
        assert l1_distance(hist, lambda x: np.zeros_like(x)) == pytest.approx(1.0, abs=1e-12)

    def test_identical_piecewise_density(self):
        counts = np.array([10, 20, 30, 40], dtype=np.int64)
        hist = Histogram(lo=-1.0, hi=1.0, bins=4, counts=counts, total=100)
        edges = hist.edges
        dens = counts / 100 / 0.5  # bin width 0.5

        def density(x):
            x = np.asarray(x)
            idx = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, 3)
            out = dens[idx]
            return np.where((x < -1.0) | (x > 1.0), 0.0, out)

        assert l1_distance(hist, density) <= 1e-12

    def test_sampled_from_density(self):
        rng = np.random.default_rng(9)
        x = rng.standard_normal(1_000_000)
        counts, _ = np.histogram(x, bins=np.linspace(-6, 6, 121))
        hist = Histogram(lo=-6.0, hi=6.0, bins=120, counts=counts.astype(np.int64),
                         total=x.size)
        d = l1_distance(hist, gaussian_density)
        assert d <= 0.02

    def test_range(self, stationary_ensemble):
        hist = passive_histogram(stationary_ensemble, 0.0)
        d = l1_distance(hist, gaussian_density)
        assert 0.0 <= d <= 2.0

    def test_empty_histogram(self):
        hist = Histogram(lo=0.0, hi=1.0, bins=2, counts=np.zeros(2, dtype=np.int64), total=0)
        with pytest.raises(ValueError):
            l1_distance(hist, gaussian_density)


class TestKsStatistic:
    def test_single_sample_at_median(self):
        assert ks_statistic([0.0], lambda x: 0.5 * np.ones_like(np.asarray(x))) == 0.5

    def test_self_comparison_zero(self):
        rng = np.random.default_rng(10)
        x = np.sort(rng.standard_normal(500))

        def ecdf(q):
            return np.searchsorted(x, q, side="right") / x.size

        assert ks_statistic(x, ecdf) == 0.0

    def test_all_mass_below_support(self):
        samples = np.full(1000, -1.0)
        uniform_cdf = lambda x: np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
        assert ks_statistic(samples, uniform_cdf) >= 0.999

    def test_drawn_from_cdf(self):
        rng = np.random.default_rng(11)
        n = 10_000
        x = rng.random(n)
        d = ks_statistic(x, lambda q: np.clip(np.asarray(q, dtype=float), 0.0, 1.0))
        # 99% Kolmogorov quantile
        assert d <= 1.63 / math.sqrt(n)

    def test_empty(self):
        with pytest.raises(ValueError):
            ks_statistic([], lambda x: x)


class TestPairEnergyCovariance:
    def test_product_measure_vanishes(self):
        rng = np.random.default_rng(12)
        snaps = rng.standard_normal((800, 1, 200))
        ens = fake_ensemble(snaps, seed=5, n_active=10)
        cov, se = pair_energy_covariance(ens, 0.0, return_stderr=True)
        assert abs(cov) <= 3.0 * se

    def test_uniform_sphere_exact_value(self):
        # coordinates of a uniform point on S^{n-1}(sqrt n): cov(x1^2, x2^2) = -2/(n+2)
        n_total, n_passive, reps = 1050, 1000, 3000
        rng = np.random.default_rng(13)
        z = rng.standard_normal((reps, n_total))
        z *= (math.sqrt(n_total) / np.linalg.norm(z, axis=1))[:, None]
        ens = fake_ensemble(z[:, None, :n_passive], seed=7, n_active=50)
        cov, se = pair_energy_covariance(ens, 0.0, return_stderr=True)
        assert abs(cov - (-2.0 / (n_total + 2.0))) <= 3.0 * se

    def test_fixed_pairs_deterministic(self, stationary_ensemble):
        a = pair_energy_covariance(stationary_ensemble, 1.0)
        b = pair_energy_covariance(stationary_ensemble, 1.0)
        assert a == b


class TestFitExponentialRate:
    def test_recovers_rate(self):
        rng = np.random.default_rng(14)
        t = np.linspace(0.0, 1.0, 40)
        se = np.full_like(t, 1e-3)
        y = 3.0 * np.exp(-2.5 * t) + rng.normal(0.0, 1e-3, t.size)
        rate = fit_exponential_rate(t, y, se)
        assert rate == pytest.approx(2.5, rel=0.02)

    def test_negative_signal(self):
        t = np.linspace(0.0, 1.0, 20)
        y = -5.0 * np.exp(-4.0 * t)
        rate = fit_exponential_rate(t, y, np.full_like(t, 1e-6))
        assert rate == pytest.approx(4.0, rel=1e-6)

    def test_noise_only_rejected(self):
        t = np.linspace(0.0, 1.0, 20)
        y = np.full_like(t, 1e-6)
        with pytest.raises(ValueError):
            fit_exponential_rate(t, y, np.ones_like(t))
