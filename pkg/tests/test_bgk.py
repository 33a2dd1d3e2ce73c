import math

import numpy as np
import pytest

from kacbgk import (
    GaussianDensity,
    InitKind,
    InitSpec,
    ModelParams,
    Schedule,
    SphereMarginalDensity,
    bgk_cdf,
    bgk_solution,
    compare_to_limit,
    run_ensemble,
)


def simpson(f, a, b, n=4800):
    x = np.linspace(a, b, n + 1)
    y = f(x)
    h = (b - a) / n
    return h / 3.0 * (y[0] + y[-1] + 4.0 * np.sum(y[1:-1:2]) + 2.0 * np.sum(y[2:-2:2]))


class TestDensities:
    def test_gaussian_pdf_cdf(self):
        g = GaussianDensity(1.0)
        assert g.pdf(0.0) == pytest.approx(0.3989422804, abs=1e-9)
        assert g.cdf(0.0) == pytest.approx(0.5, abs=1e-14)
        assert g.cdf(-30.0) == pytest.approx(0.0, abs=1e-15)
        assert g.cdf(30.0) == pytest.approx(1.0, abs=1e-15)

    def test_sphere_marginal_normalized(self):
        f = SphereMarginalDensity(60)
        mass = simpson(f.pdf, -math.sqrt(60.0), math.sqrt(60.0), 20_000)
        assert mass == pytest.approx(1.0, abs=1e-8)

    def test_sphere_marginal_cdf_matches_pdf(self):
        f = SphereMarginalDensity(25)
        for x in (-3.0, -1.0, 0.0, 0.7, 2.5):
            quad = simpson(f.pdf, -math.sqrt(25.0) + 1e-12, x, 20_000)
            assert f.cdf(x) == pytest.approx(quad, abs=1e-7)
        assert f.cdf(-math.sqrt(25.0)) == 0.0
        assert f.cdf(math.sqrt(25.0)) == 1.0

    def test_invalid(self):
        with pytest.raises(ValueError):
            GaussianDensity(0.0)
        with pytest.raises(ValueError):
            SphereMarginalDensity(2)


class TestBgkSolution:
    def test_t_zero_is_f0(self):
        f0 = GaussianDensity(0.5)
        xs = np.linspace(-3, 3, 7)
        assert np.array_equal(bgk_solution(f0, xs, 0.0), f0.pdf(xs))

    def test_maxwellian_fixed_point(self):
        f0 = GaussianDensity(1.0)
        xs = np.linspace(-4, 4, 9)
        for t in (0.0, 0.3, 2.0, 10.0):
            assert np.allclose(bgk_solution(f0, xs, t), f0.pdf(xs), rtol=1e-14)

    def test_mixture_value(self):
        val = bgk_solution(GaussianDensity(0.5), 0.0, math.log(2.0))
        want = 0.5 / (0.5 * math.sqrt(2 * math.pi)) + 0.5 / math.sqrt(2 * math.pi)
        assert val == pytest.approx(want, abs=1e-9)
        assert val == pytest.approx(0.598413, abs=1e-6)

    @pytest.mark.parametrize("t", [0.0, 0.5, 1.0, 5.0])
    @pytest.mark.parametrize("f0", [GaussianDensity(0.5), SphereMarginalDensity(60)])
    def test_mass_conserved(self, t, f0):
        mass = simpson(lambda x: bgk_solution(f0, x, t), -12.0, 12.0)
        assert mass == pytest.approx(1.0, abs=1e-8)

    def test_second_moment_relaxes_exponentially(self):
        # integral of v^2 f(., t) - 1 = e^-t (sigma0^2 - 1) exactly
        f0 = GaussianDensity(0.5)
        for t in (0.0, 0.7, 2.0):
            second = simpson(lambda x: x * x * bgk_solution(f0, x, t), -12.0, 12.0, 9600)
            want = 1.0 + math.exp(-t) * (0.25 - 1.0)
            assert second == pytest.approx(want, abs=1e-10)

    def test_l1_relaxation_is_exponential(self):
        # |f(., t) - M| = e^-t |f0 - M| pointwise, so the L1 distance obeys
        # the same identity; in particular it is monotone in t
        f0 = GaussianDensity(0.5)
        maxw = GaussianDensity(1.0)
        base = simpson(lambda x: np.abs(f0.pdf(x) - maxw.pdf(x)), -12.0, 12.0)
        dists = {}
        for t in (0.5, 1.0, 10.0):
            d = simpson(lambda x: np.abs(bgk_solution(f0, x, t) - maxw.pdf(x)), -12.0, 12.0)
            assert d == pytest.approx(math.exp(-t) * base, abs=1e-8)
            dists[t] = d
        assert dists[10.0] <= dists[1.0]

    def test_cdf_mixture(self):
        f0 = GaussianDensity(0.5)
        t = 0.8
        a = math.exp(-t)
        xs = np.linspace(-4, 4, 9)
        want = a * f0.cdf(xs) + (1 - a) * GaussianDensity(1.0).cdf(xs)
        assert np.allclose(bgk_cdf(f0, xs, t), want, rtol=1e-14)

    def test_negative_time(self):
        with pytest.raises(ValueError):
            bgk_solution(GaussianDensity(1.0), 0.0, -0.5)


class TestCompareToLimit:
    def test_stationary_marginal(self):
        # uniform initial data: the passive marginal is the sphere marginal
        # at every time, and the mixture built from it stays within the
        # sampling-noise floor (pre-build oracle: ~0.017 +- 0.003 for
        # 20 x 1000 samples on 24 bins, so 0.03 is a robust bound)
        n, m = 1000, 50
        params = ModelParams(n_passive=n, n_active=m, lam=1.0, seed=314)
        sch = Schedule(t_end=0.5, sample_times=np.array([0.5]))
        ens = run_ensemble(params, InitSpec(InitKind.UNIFORM_SPHERE), sch, 20,
                           record_snapshots=True)
        f0 = SphereMarginalDensity(n + m)
        l1, ks = compare_to_limit(ens, f0, 0.5, bins=24)
        assert l1 <= 0.03
        assert ks <= 0.02

    def test_missing_time_rejected(self):
        params = ModelParams(n_passive=50, n_active=10, lam=1.0, seed=1)
        sch = Schedule(t_end=0.5, sample_times=np.array([0.5]))
        ens = run_ensemble(params, InitSpec(InitKind.UNIFORM_SPHERE), sch, 3,
                           record_snapshots=True)
        with pytest.raises(ValueError):
            compare_to_limit(ens, GaussianDensity(1.0), 0.25)
