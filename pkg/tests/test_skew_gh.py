import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy import stats

from tests import oracles
from tests.params import PRESETS, random_params
from vgtail.gig import ParameterError, gig_mean
from vgtail.numerics import integrate
from vgtail.skew_gh import (
    EquiSkewGHParams,
    SampleBatch,
    alpha_from_rho,
    bivariate_normal_cdf,
    joint_cdf,
    joint_log_cdf_diagonal,
    log_skew_normal_cdf,
    marginal_log_cdf,
    marginal_log_pdf,
    marginal_quantile,
    sample_bivariate,
    skew_normal_cdf,
    xstar_log_cdf,
    xstar_log_pdf,
)

CANON = PRESETS["vg_nu1_canonical"]


class TestParams:
    def test_alpha(self):
        assert alpha_from_rho(0.0) == 1.0
        assert_allclose(alpha_from_rho(0.5), math.sqrt(1 / 3), rtol=1e-15)

    @pytest.mark.parametrize("rho", [1.0, -1.0, 1 - 1e-7, -1 + 1e-7, 2.0])
    def test_rho_bound(self, rho):
        with pytest.raises(ParameterError, match="rho"):
            EquiSkewGHParams.vg(1.0, 0.0, rho)

    def test_b_positive(self):
        with pytest.raises(ParameterError, match="b > 0"):
            EquiSkewGHParams.gh(-1.0, 1.0, 0.0, 0.0, 0.0)

    def test_vg_mapping(self):
        prm = EquiSkewGHParams.vg(0.5, 0.1, 0.2)
        assert (prm.p, prm.a, prm.b) == (0.5, 0.0, 2.0)

    def test_batch_shape(self):
        with pytest.raises(ValueError):
            SampleBatch(np.zeros((3, 2)), 0, 4, CANON)


class TestSkewNormal:
    def test_alpha_zero_is_normal(self):
        t = np.linspace(-30, 5, 15)
        assert_allclose(log_skew_normal_cdf(t, 0.0), stats.norm.logcdf(t), rtol=1e-14)

    def test_orthant(self):
        assert_allclose(math.exp(log_skew_normal_cdf(0.0, 1.0)), 0.25, rtol=1e-15)

    @pytest.mark.parametrize("alpha", [0.1, 0.7, 3.0, -2.0])
    def test_at_zero(self, alpha):
        assert_allclose(math.exp(log_skew_normal_cdf(0.0, alpha)), 0.5 - math.atan(alpha) / math.pi, rtol=1e-14)

    @pytest.mark.parametrize("t, alpha", [
        (-0.5, 1.0), (-0.99, 0.3), (-1.0, 2.9), (-1.01, 3.1), (-2.0, 0.5), (-2.0, 1.49), (-2.0, 1.51),
        (-6.0, 0.4), (-20.0, 0.2), (-40.0, 2.0), (-0.9, 50.0), (-150.0, 0.01), (-300.0, 1.0),
        (-5.0, -1.5), (-2.0, -0.3), (-0.2, -4.0), (3.0, 0.7), (1.0, -2.0), (0.4, 5.0),
    ])
    def test_against_mpmath(self, t, alpha):
        # spans every evaluation regime and both sides of each switch-over
        ref = oracles.log_sn_cdf(t, alpha)
        assert abs(log_skew_normal_cdf(t, alpha) - ref) <= 1e-13 * max(1.0, abs(ref))

    def test_plain_cdf_matches_log(self):
        # Phi - 2T cancels in the lower tail, which is what the log form avoids
        t = np.linspace(-3, 3, 13)
        assert_allclose(skew_normal_cdf(t, 0.8), np.exp(log_skew_normal_cdf(t, 0.8)), rtol=1e-11)

    @given(st.floats(-12, 12), st.floats(-8, 8))
    @settings(max_examples=300, deadline=None)
    def test_reflection(self, t, alpha):
        # F_SN(t; alpha) + F_SN(-t; -alpha) = 1
        s = math.exp(log_skew_normal_cdf(t, alpha)) + math.exp(log_skew_normal_cdf(-t, -alpha))
        assert abs(s - 1.0) <= 1e-14

    @given(st.floats(0.01, 10))
    @settings(max_examples=50, deadline=None)
    def test_monotone(self, alpha):
        t = np.linspace(-60, 6, 200)
        assert np.all(np.diff(log_skew_normal_cdf(t, alpha)) > 0)

    def test_is_law_of_the_maximum(self):
        # max(Z1, Z2) with correlation rho is skew normal with alpha(rho)
        for rho in (-0.6, 0.0, 0.4):
            t = np.array([-1.3, 0.2, 1.1])
            assert_allclose(np.exp(log_skew_normal_cdf(t, alpha_from_rho(rho))),
                            bivariate_normal_cdf(t, t, rho), rtol=1e-12)


class TestBivariateNormal:
    @pytest.mark.parametrize("h, k, rho", [(0.3, -1.2, 0.5), (-2.0, -1.0, -0.7), (0.0, 0.0, 0.3), (1.5, 0.0, 0.2)])
    def test_against_scipy(self, h, k, rho):
        ref = stats.multivariate_normal(cov=[[1, rho], [rho, 1]]).cdf([h, k])
        assert_allclose(bivariate_normal_cdf(h, k, rho), ref, rtol=1e-6)

    def test_orthant(self):
        for rho in (-0.9, 0.0, 0.5):
            assert_allclose(bivariate_normal_cdf(0.0, 0.0, rho), 0.25 + math.asin(rho) / (2 * math.pi), atol=1e-15)


class TestMarginal:
    def test_laplace_density_at_zero(self):
        prm = EquiSkewGHParams.gh(1.0, 0.0, math.sqrt(2), 0.0, 0.0)
        assert_allclose(math.exp(marginal_log_pdf(0.0, prm)), 1 / math.sqrt(2), rtol=1e-14)

    def test_singular_at_zero(self):
        assert marginal_log_pdf(0.0, CANON) == np.inf

    @pytest.mark.parametrize("name", list(PRESETS))
    def test_normalization(self, name):
        prm = PRESETS[name]
        total = integrate(lambda x: np.exp(marginal_log_pdf(x, prm)), (-np.inf, np.inf), points=[0.0])
        assert abs(total - 1) < 1e-8

    @pytest.mark.parametrize("name", ["vg_nu1_canonical", "gh_p1_a05", "vg_nu05_negtheta"])
    @pytest.mark.parametrize("x", [-30.0, -4.0, -0.7, 1.5])
    def test_against_mixture_oracle(self, name, x):
        # independent route: E_W[Phi((x - theta W)/sqrt(W))] at 30 digits
        prm = PRESETS[name]
        ref = oracles.log_marginal_cdf(x, prm)
        assert abs(marginal_log_cdf(x, prm) - ref) <= 1e-9 * max(1.0, abs(ref))

    def test_symmetric_at_zero_theta(self):
        assert_allclose(marginal_log_cdf(0.0, CANON), math.log(0.5), rtol=1e-10)

    @pytest.mark.parametrize("name", list(PRESETS))
    def test_monotone(self, name):
        vals = [marginal_log_cdf(x, PRESETS[name]) for x in np.linspace(-60, 4, 33)]
        assert np.all(np.diff(vals) > 0)

    @pytest.mark.parametrize("name", list(PRESETS))
    @pytest.mark.parametrize("u", [0.9, 0.5, 0.05, 1e-3, 1e-9, 1e-20])
    def test_quantile_roundtrip(self, name, u):
        prm = PRESETS[name]
        q = marginal_quantile(u, prm)
        assert_allclose(marginal_log_cdf(q, prm), math.log(u), rtol=1e-9, atol=1e-10)

    @pytest.mark.parametrize("u", [0.0, 1.0])
    def test_quantile_domain(self, u):
        with pytest.raises(ValueError):
            marginal_quantile(u, CANON)


class TestJointDiagonal:
    @pytest.mark.parametrize("name", ["vg_nu1_canonical", "gh_p1_a05"])
    def test_orthant_independent(self, name):
        prm = PRESETS[name]
        prm = EquiSkewGHParams(prm.gig, 0.0, 0.0)
        assert_allclose(joint_log_cdf_diagonal(0.0, prm), math.log(0.25), rtol=1e-10)

    @pytest.mark.parametrize("rho", [-0.8, -0.3, 0.5, 0.9])
    def test_orthant_correlated(self, rho):
        for gig in (PRESETS["gh_pm05_a1"].gig, CANON.gig):
            prm = EquiSkewGHParams(gig, 0.0, rho)
            ref = math.log(0.25 + math.asin(rho) / (2 * math.pi))
            assert abs(joint_log_cdf_diagonal(0.0, prm) - ref) < 1e-10

    @pytest.mark.parametrize("y", [-1.0, -10.0, -40.0])
    def test_independent_case_mpmath(self, y):
        prm = EquiSkewGHParams.gh(0.8, 0.6, 1.2, 0.25, 0.0)
        ref = oracles.log_joint_diag_independent(y, prm)
        assert abs(joint_log_cdf_diagonal(y, prm) - ref) <= 1e-9 * max(1.0, abs(ref))

    @given(st.integers(0, 2**31 - 1), st.floats(-8.0, 2.0))
    @settings(max_examples=8, deadline=None)
    def test_reduction_identity(self, seed, y):
        # mixture of skew normal CDFs vs direct quadrature of the X* density
        prm = random_params(np.random.default_rng(seed), p_range=(-2.0, 2.0), theta_range=(-1.0, 1.0))
        lj = joint_log_cdf_diagonal(y, prm)
        lx = xstar_log_cdf(y, prm)
        assert abs(math.expm1(lx - lj)) < 1e-7

    @pytest.mark.parametrize("name", list(PRESETS))
    def test_monotone(self, name):
        vals = [joint_log_cdf_diagonal(y, PRESETS[name]) for y in np.linspace(-80, 4, 29)]
        assert np.all(np.diff(vals) > 0)

    def test_xstar_density_is_derivative(self):
        prm = PRESETS["gh_pm05_a1"]
        y, h = -3.0, 1e-4
        slope = (xstar_log_cdf(y + h, prm) - xstar_log_cdf(y - h, prm)) / (2 * h)
        assert_allclose(math.exp(xstar_log_pdf(y, prm) - xstar_log_cdf(y, prm)), slope, rtol=1e-6)

    def test_xstar_density_normalizes(self):
        prm = PRESETS["gh_p1_a05"]
        total = integrate(lambda x: np.exp(xstar_log_pdf(x, prm)), (-np.inf, np.inf), points=[0.0])
        assert abs(total - 1) < 1e-8

    def test_below_marginal(self):
        prm = PRESETS["vg_nu2_skewed"]
        for y in (-20.0, -3.0, 0.5):
            assert joint_log_cdf_diagonal(y, prm) < marginal_log_cdf(y, prm)


class TestJointCdf:
    @pytest.mark.parametrize("name", ["vg_nu2_skewed", "gh_pm05_a1"])
    def test_diagonal_consistency(self, name):
        prm = PRESETS[name]
        for y in (-3.0, -0.5, 1.0):
            assert_allclose(joint_cdf(y, y, prm), math.exp(joint_log_cdf_diagonal(y, prm)), rtol=1e-8)

    def test_exchangeable(self):
        prm = PRESETS["gh_p1_a05"]
        assert_allclose(joint_cdf(-1.0, 0.7, prm), joint_cdf(0.7, -1.0, prm), rtol=1e-12)

    def test_margin_limit(self):
        prm = PRESETS["vg_nu2_skewed"]
        assert_allclose(joint_cdf(-1.0, 40.0, prm), math.exp(marginal_log_cdf(-1.0, prm)), rtol=1e-8)


class TestSampling:
    def test_deterministic(self):
        a = sample_bivariate(PRESETS["gh_p1_a05"], 1000, 9).pairs
        b = sample_bivariate(PRESETS["gh_p1_a05"], 1000, 9).pairs
        assert np.array_equal(a, b)

    def test_orthant(self):
        n = 10**6
        x = sample_bivariate(CANON, n, 1).pairs
        est = np.mean((x[:, 0] <= 0) & (x[:, 1] <= 0))
        assert abs(est - 0.25) < 4 * math.sqrt(0.25 * 0.75 / n)

    @pytest.mark.parametrize("name", list(PRESETS))
    def test_mean(self, name):
        prm = PRESETS[name]
        n = 10**6
        x = sample_bivariate(prm, n, 2).pairs[:, 0]
        assert abs(x.mean() - prm.theta * gig_mean(prm.gig)) < 4 * x.std() / math.sqrt(n)

    @pytest.mark.parametrize("rho", [-0.5, 0.0, 0.7])
    def test_correlation(self, rho):
        # batch means give an honest standard error under the heavy-tailed mixture
        prm = EquiSkewGHParams.gh(1.5, 1.0, 1.0, 0.0, rho)
        x = sample_bivariate(prm, 10**6, 3).pairs.reshape(100, -1, 2)
        r = np.array([np.corrcoef(b[:, 0], b[:, 1])[0, 1] for b in x])
        assert abs(r.mean() - rho) < 4 * r.std(ddof=1) / math.sqrt(len(r))

    def test_exchangeable(self):
        n = 10**6
        x = sample_bivariate(PRESETS["gh_pm05_a1"], n, 4).pairs
        s, t = -0.5, 0.8
        d = ((x[:, 0] <= s) & (x[:, 1] <= t)).astype(float) - ((x[:, 0] <= t) & (x[:, 1] <= s))
        assert abs(d.mean()) < 4 * d.std() / math.sqrt(n)

    def test_joint_tail_monte_carlo(self):
        # y = -5 with positive skew; ~10 expected hits per million
        prm = EquiSkewGHParams.vg(1.0, 0.3, 0.5)
        n = 10**7
        x = sample_bivariate(prm, n, 5).pairs
        p = math.exp(joint_log_cdf_diagonal(-5.0, prm))
        est = np.mean((x[:, 0] <= -5.0) & (x[:, 1] <= -5.0))
        assert abs(est - p) < 3 * math.sqrt(p * (1 - p) / n)

    def test_bad_n(self):
        with pytest.raises(ValueError):
            sample_bivariate(CANON, 0, 1)

    def test_theta_pair(self):
        prm = PRESETS["gh_p1_a05"]
        same = sample_bivariate(prm, 1000, 6, theta_pair=(prm.theta, prm.theta)).pairs
        assert np.array_equal(same, sample_bivariate(prm, 1000, 6).pairs)
        n = 10**6
        x = sample_bivariate(prm, n, 6, theta_pair=(-0.5, 0.8)).pairs
        ew = gig_mean(prm.gig)
        for col, th in ((0, -0.5), (1, 0.8)):
            assert abs(x[:, col].mean() - th * ew) < 4 * x[:, col].std() / math.sqrt(n)
        with pytest.raises(ParameterError):
            sample_bivariate(prm, 10, 6, theta_pair=(0.1, np.nan))
