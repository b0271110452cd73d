"""Tests for the distribution kernel against scipy.stats"""

import math

import numpy as np
import pytest
from scipy import stats

from causaleval.analysis.distributions import (
    f_sf,
    kolmogorov_pvalue,
    ks_statistic,
    normal_cdf,
    normal_quantile,
    student_cdf,
    student_quantile,
    uniform_cdf,
)


class TestNormal:
    def test_known_values(self):
        assert normal_cdf(0.0) == 0.5
        assert normal_quantile(0.975) == pytest.approx(1.959963984540054, rel=1e-12)

    def test_vectorized(self):
        x = np.linspace(-5.0, 5.0, 11)

        np.testing.assert_allclose(normal_cdf(x), stats.norm.cdf(x), rtol=1e-12, atol=1e-300)
        np.testing.assert_allclose(normal_quantile(normal_cdf(x)), x, atol=1e-9)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.5])
    def test_quantile_outside_unit_interval(self, p):
        with pytest.raises(ValueError):
            normal_quantile(p)


class TestStudent:
    @pytest.mark.parametrize("df", [1, 2, 3, 5, 10, 30, 200])
    def test_cdf_matches_scipy(self, df):
        for x in [-8.0, -2.5, -0.3, 0.0, 0.7, 1.96, 12.0]:
            assert student_cdf(x, df) == pytest.approx(stats.t.cdf(x, df), rel=1e-10, abs=1e-14)

    @pytest.mark.parametrize("df", [1, 2, 4, 9, 25, 100, 1e6])
    @pytest.mark.parametrize("p", [0.001, 0.025, 0.3, 0.5, 0.8, 0.975, 0.9995])
    def test_quantile_matches_scipy(self, p, df):
        assert student_quantile(p, df) == pytest.approx(stats.t.ppf(p, df), rel=1e-9, abs=1e-12)

    def test_quantile_inverts_cdf(self):
        for df in [3, 17]:
            for p in [0.05, 0.5, 0.99]:
                assert student_cdf(student_quantile(p, df), df) == pytest.approx(p, abs=1e-12)

    def test_infinite_argument(self):
        assert student_cdf(math.inf, 4) == 1.0
        assert student_cdf(-math.inf, 4) == 0.0

    def test_symmetry(self):
        assert student_quantile(0.1, 6) == -student_quantile(0.9, 6)

    def test_invalid_df(self):
        with pytest.raises(ValueError, match="degrees of freedom"):
            student_cdf(0.0, 0)


class TestFAndKolmogorov:
    @pytest.mark.parametrize("f, d1, d2", [(0.5, 1, 10), (3.2, 2, 57), (10.0, 5, 5), (1.0, 30, 300)])
    def test_f_survival_matches_scipy(self, f, d1, d2):
        assert f_sf(f, d1, d2) == pytest.approx(stats.f.sf(f, d1, d2), rel=1e-10)

    def test_f_at_zero(self):
        assert f_sf(0.0, 3, 10) == 1.0

    @pytest.mark.parametrize("d, n", [(0.05, 100), (0.1, 50), (0.2, 30), (0.01, 1000)])
    def test_kolmogorov_matches_scipy(self, d, n):
        expected = stats.kstwobign.sf(math.sqrt(n) * d)

        assert kolmogorov_pvalue(d, n) == pytest.approx(expected, rel=1e-10)

    def test_kolmogorov_degenerate(self):
        assert kolmogorov_pvalue(0.0, 10) == 1.0
        with pytest.raises(ValueError):
            kolmogorov_pvalue(0.1, 0)


class TestKsStatistic:
    def test_matches_scipy_normal(self, rng):
        sample = rng.normal(size=200)

        assert ks_statistic(sample, normal_cdf) == pytest.approx(stats.kstest(sample, "norm")[0], rel=1e-12)

    def test_matches_scipy_uniform(self, rng):
        sample = rng.random(150)

        assert ks_statistic(sample, uniform_cdf) == pytest.approx(stats.kstest(sample, "uniform")[0], rel=1e-12)

    def test_single_point(self):
        assert ks_statistic(np.array([0.5]), uniform_cdf) == 0.5

    def test_empty_sample(self):
        with pytest.raises(ValueError):
            ks_statistic(np.array([]), uniform_cdf)
