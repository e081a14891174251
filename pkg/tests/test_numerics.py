"""Special functions against high-precision mpmath oracles."""

import math

import mpmath
import numpy as np
import pytest

from bacs.errors import ConvergenceError, DomainError, NoSignChangeError
from bacs.numerics import (
    beta_cdf,
    beta_log_density,
    beta_quantile,
    binomial_cdf,
    binomial_logpmf,
    binomial_pmf,
    binomial_pmf_table,
    binomial_sf,
    check_probability,
    find_root,
    normal_cdf,
    normal_pdf,
    normal_quantile,
    normal_sf,
)

mpmath.mp.dps = 40


def _mp_phi(x):
    return float(mpmath.ncdf(x))


class TestNormal:
    def test_symmetry_point(self):
        assert normal_cdf(0.0) == 0.5
        assert normal_quantile(0.5) == 0.0

    @pytest.mark.parametrize("x", [-8.0, -5.0, -1.959964, -0.3, 0.7, 1.959964, 3.1, 6.0])
    def test_cdf_matches_oracle(self, x):
        assert abs(normal_cdf(x) - _mp_phi(x)) <= 1e-12

    def test_far_tail(self):
        assert normal_cdf(-8.0) <= 1e-15
        np.testing.assert_allclose(normal_cdf(-8.0), _mp_phi(-8.0), rtol=1e-10)

    def test_reference_values(self):
        assert abs(normal_cdf(1.959964) - 0.975) <= 1e-6
        assert abs(normal_quantile(0.975) - 1.959964) <= 1e-5
        assert abs(normal_quantile(0.9) - 1.281552) <= 1e-5

    def test_sf_complements_cdf(self):
        xs = np.linspace(-6, 6, 101)
        np.testing.assert_allclose(normal_sf(xs) + normal_cdf(xs), 1.0, atol=1e-15)

    def test_cdf_monotone(self):
        xs = np.linspace(-10, 10, 20001)
        assert np.all(np.diff(normal_cdf(xs)) >= 0)

    @pytest.mark.parametrize("p", [1e-12, 1e-6, 0.025, 0.3, 0.5, 0.8, 0.975, 1 - 1e-9])
    def test_quantile_inverts_cdf(self, p):
        assert abs(normal_cdf(normal_quantile(p)) - p) <= 1e-10

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.1, 1.2, float("nan")])
    def test_quantile_domain(self, p):
        with pytest.raises(DomainError):
            normal_quantile(p)

    def test_pdf(self):
        np.testing.assert_allclose(normal_pdf(0.3), float(mpmath.npdf(0.3)), rtol=1e-14)


class TestBinomial:
    def test_degenerate_p(self):
        assert binomial_pmf(0, 5, 0.0) == 1.0
        assert binomial_pmf(5, 5, 1.0) == 1.0
        assert binomial_pmf(1, 5, 0.0) == 0.0

    def test_direct_product(self):
        p = 2 / 9
        direct = math.comb(9, 2) * p**2 * (1 - p) ** 7
        np.testing.assert_allclose(binomial_pmf(2, 9, p), direct, rtol=1e-12)

    def test_normalisation(self):
        assert abs(sum(binomial_pmf(k, 21, 0.1) for k in range(22)) - 1.0) <= 1e-12
        assert abs(binomial_pmf_table(400, 0.22).sum() - 1.0) <= 1e-12

    @pytest.mark.parametrize("k,n,p", [(3, 1000, 0.01), (500, 1000, 0.5), (950, 2000, 0.47), (0, 1500, 0.002)])
    def test_large_n_against_oracle(self, k, n, p):
        ref = mpmath.binomial(n, k) * mpmath.mpf(p) ** k * (1 - mpmath.mpf(p)) ** (n - k)
        np.testing.assert_allclose(binomial_pmf(k, n, p), float(ref), rtol=1e-12)
        np.testing.assert_allclose(binomial_logpmf(k, n, p), float(mpmath.log(ref)), rtol=1e-12)

    def test_pet_values(self):
        assert abs(binomial_cdf(2, 21, 0.1) - 0.648) <= 0.002
        assert abs(binomial_cdf(4, 36, 0.1) - 0.71) <= 0.01

    def test_cdf_sf_edges(self):
        assert binomial_cdf(-1, 10, 0.3) == 0.0
        assert binomial_cdf(10, 10, 0.3) == pytest.approx(1.0, abs=1e-15)
        assert binomial_sf(0, 10, 0.3) == 1.0
        assert binomial_sf(11, 10, 0.3) == 0.0

    @pytest.mark.parametrize("k", [0, 5, 12, 30])
    def test_cdf_plus_sf(self, k):
        assert abs(binomial_cdf(k, 70, 0.22) + binomial_sf(k + 1, 70, 0.22) - 1.0) <= 1e-12

    def test_k_above_n_rejected(self):
        with pytest.raises(DomainError):
            binomial_pmf(6, 5, 0.5)


class TestBeta:
    @pytest.mark.parametrize("x,a,b", [(0.1, 3, 8), (0.22, 3, 8), (0.5, 0.5, 0.5), (0.9, 20, 2)])
    def test_cdf_against_oracle(self, x, a, b):
        ref = float(mpmath.betainc(a, b, 0, x, regularized=True))
        np.testing.assert_allclose(beta_cdf(x, a, b), ref, rtol=1e-12, atol=1e-15)

    def test_log_density(self):
        ref = mpmath.log(mpmath.mpf(0.22) ** 2 * mpmath.mpf(0.78) ** 7 / mpmath.beta(3, 8))
        np.testing.assert_allclose(beta_log_density(0.22, 3, 8), float(ref), rtol=1e-13)

    @pytest.mark.parametrize("q", [0.025, 0.5, 0.975])
    def test_quantile_inverse(self, q):
        x = beta_quantile(q, 3, 8)
        assert abs(beta_cdf(x, 3, 8) - q) <= 1e-8

    def test_equal_tails_interval(self):
        lo, hi = beta_quantile(0.025, 3, 8), beta_quantile(0.975, 3, 8)
        assert round(lo, 2) == 0.07
        assert round(hi, 2) == 0.56


class TestFindRoot:
    def test_simple(self):
        assert abs(find_root(lambda x: x * x - 2.0, (0.0, 2.0)) - math.sqrt(2)) <= 1e-12

    def test_flat_tail(self):
        z = find_root(lambda x: normal_sf(x) - 1e-9, (0.0, 10.0))
        assert abs(normal_sf(z) - 1e-9) <= 1e-20

    def test_no_sign_change(self):
        with pytest.raises(NoSignChangeError):
            find_root(lambda x: x * x + 1.0, (-1.0, 1.0))

    def test_bad_bracket(self):
        with pytest.raises(DomainError):
            find_root(lambda x: x, (1.0, -1.0))

    def test_iteration_cap(self):
        with pytest.raises(ConvergenceError):
            find_root(lambda x: x - 1e-3, (-1.0, 1.0), tol=1e-300, max_iter=2)


class TestCheckProbability:
    def test_accepts_interval(self):
        assert check_probability(0.0) == 0.0
        assert check_probability(1.0) == 1.0

    @pytest.mark.parametrize("v", [-0.01, 1.01, float("nan")])
    def test_rejects(self, v):
        with pytest.raises(DomainError):
            check_probability(v)

    def test_open_interval(self):
        with pytest.raises(DomainError):
            check_probability(0.0, open_interval=True)
