import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from pytest import approx
from scipy import special as sp

from dpp_repulsion.quadrature import (
    InfiniteMassError,
    LogIntegrand,
    QuadratureConfig,
    QuadratureError,
    bessel_sq_moment_log,
    bessel_sq_prefix_log,
    build_cdf,
    integrate_log,
    integrate_log_panels,
    inverse_cdf,
)
from dpp_repulsion.special import bessel_k, ln_gamma

# ln of int_0^inf J_mu(y)^2 y^{-lam} dy, frozen 40-digit values
BESSEL_SQ_REFS = [
    (1.0, 1.0, -0.6931471805599453094172),
    (5.5, 2.0, -4.545927267511555549557),
    (26.0, 1.0, -3.951243718581427354888),
    (26.0, 3.0, -11.15910359001390248769),
    (50.5, 2.0, -8.988578524001872004407),
    (50.5, 3.0, -13.15182217464553983909),
    (2.0, 1.5, -1.98416238776074777776),
]


class TestIntegrateLog:
    def test_unit_integrand(self):
        got = integrate_log(lambda r: np.zeros_like(r), 0.0, 1.0, rel_tol=1e-10)
        assert got.sign == 1
        assert got.log_magnitude == approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("a,b", [(1.0, 0.0), (2.0, 3.0), (0.25, 7.5)])
    def test_gaussian_with_power_weight(self, a, b):
        # int_0^inf r^b e^{-a r^2} dr = (1/2) a^{-(b+1)/2} Gamma((b+1)/2)
        f = LogIntegrand(lambda r: -a * r * r + b * np.log(np.maximum(r, 1e-300)),
                         r_lo=0.0, r_hi=math.inf)
        want = math.log(0.5) - 0.5 * (b + 1.0) * math.log(a) + ln_gamma(0.5 * (b + 1.0))
        got = integrate_log(f, rel_tol=1e-11)
        assert got.log_magnitude == approx(want, rel=1e-10, abs=1e-10)

    def test_sharply_peaked_high_dimension(self):
        n, alpha = 600, 0.3
        f = LogIntegrand(lambda r: (n - 1) * np.log(np.maximum(r, 1e-300))
                         - 2.0 * r * r / alpha**2, 0.0, math.inf)
        want = math.log(0.5) - 0.5 * n * math.log(2.0 / alpha**2) + ln_gamma(0.5 * n)
        assert integrate_log(f, rel_tol=1e-11).log_magnitude == approx(want, rel=1e-10)

    def test_bessel_k_weighted_closed_form(self):
        # int_0^inf r^k K_nu(r/alpha)^2 dr for k > 2 nu - 1
        nu, alpha = 1.5, 0.7
        for k in (4.0, 7.0):
            def log_f(r, k=k):
                out = np.full(r.shape, -np.inf)
                pos = r > 0
                lk = np.array([bessel_k(nu, float(x) / alpha).log_magnitude
                               for x in r[pos]])
                out[pos] = k * np.log(r[pos]) + 2.0 * lk
                return out
            want = ((k - 2.0) * math.log(2.0) + (k + 1.0) * math.log(alpha)
                    - ln_gamma(k + 1.0) + ln_gamma(0.5 * (1 + k) + nu)
                    + 2.0 * ln_gamma(0.5 * (k + 1.0)) + ln_gamma(0.5 * (1 + k) - nu))
            got = integrate_log(LogIntegrand(log_f, 0.0, math.inf), rel_tol=1e-10)
            assert got.log_magnitude == approx(want, rel=1e-9)

    @given(st.floats(min_value=-500.0, max_value=500.0))
    @settings(max_examples=40, deadline=None)
    def test_shift_invariance(self, shift):
        f0 = LogIntegrand(lambda r: -3.0 * (r - 1.0) ** 2, 0.0, math.inf)
        f1 = LogIntegrand(lambda r: -3.0 * (r - 1.0) ** 2 + shift, 0.0, math.inf)
        a = integrate_log(f0, rel_tol=1e-10).log_magnitude
        b = integrate_log(f1, rel_tol=1e-10).log_magnitude
        assert b - a == approx(shift, rel=1e-12, abs=1e-9)

    def test_rel_tol_domain(self):
        with pytest.raises(ValueError):
            integrate_log(lambda r: np.zeros_like(r), 0.0, 1.0, rel_tol=0.5)
        with pytest.raises(ValueError):
            integrate_log(lambda r: np.zeros_like(r), 1.0, 1.0, rel_tol=1e-8)

    def test_nonconvergence_carries_partial(self):
        cfg = QuadratureConfig(rel_tol=1e-13, max_depth=0, scan_points=8)
        f = LogIntegrand(lambda r: np.cos(40.0 * r) - r, 0.0, 1.0)
        with pytest.raises(QuadratureError) as err:
            integrate_log_panels(f, config=cfg)
        assert math.isfinite(err.value.log_error_bound)
        assert math.isfinite(err.value.log_partial)

    def test_prefix_matches_incomplete_gamma_deep_tail(self):
        n, alpha = 600, 0.3
        f = LogIntegrand(lambda r: (n - 1) * np.log(np.maximum(r, 1e-300))
                         - 2.0 * r * r / alpha**2, 0.0, math.inf)
        ps = integrate_log_panels(f, rel_tol=1e-11)
        for rq in (0.9, 2.0, 4.5):
            t = 2.0 * rq * rq / alpha**2
            want = (math.log(0.5) - 0.5 * n * math.log(2.0 / alpha**2)
                    + ln_gamma(0.5 * n) + math.log(sp.gammainc(0.5 * n, t)))
            assert ps.log_prefix(rq, rel_tol=1e-10) == approx(want, rel=1e-9, abs=1e-8)


class TestCdf:
    @staticmethod
    def gaussian_density(n=12, alpha=0.5):
        return LogIntegrand(lambda r: (n - 1) * np.log(np.maximum(r, 1e-300))
                            - 2.0 * r * r / alpha**2, 0.0, math.inf), n, alpha

    def test_gaussian_cdf_matches_incomplete_gamma_at_nodes(self):
        # the node-level contract; between nodes only interpolation accuracy holds
        f, n, alpha = self.gaussian_density()
        cdf = build_cdf(f, rel_tol=1e-10)
        nodes = cdf.nodes[(cdf.nodes > 0.05) & (cdf.nodes < 2.0)]
        want = sp.gammainc(0.5 * n, 2.0 * nodes**2 / alpha**2)
        got = cdf.cdf(nodes)
        assert got == approx(want, abs=5e-10)

    def test_gaussian_cdf_interpolated_between_nodes(self):
        f, n, alpha = self.gaussian_density()
        cdf = build_cdf(f, rel_tol=1e-10)
        rs = np.linspace(0.2, 1.2, 41)
        want = sp.gammainc(0.5 * n, 2.0 * rs**2 / alpha**2)
        assert cdf.cdf(rs) == approx(want, abs=2e-5)

    def test_total_normalizes_to_one(self):
        f, *_ = self.gaussian_density()
        cdf = build_cdf(f, rel_tol=1e-9)
        assert cdf.cdf(np.array([cdf.nodes[-1]]))[0] == approx(1.0, abs=1e-12)
        assert np.all(np.diff(cdf.log_mass[1:]) >= 0.0)

    def test_below_support_is_zero(self):
        f = LogIntegrand(lambda r: np.where(r >= 1.0, -(r - 2.0) ** 2, -np.inf),
                         r_lo=0.0, r_hi=math.inf)
        cdf = build_cdf(f, rel_tol=1e-8)
        assert cdf.cdf(0.5) == approx(0.0, abs=1e-13)

    def test_infinite_mass_detected(self):
        f = LogIntegrand(lambda r: np.zeros_like(r), 0.0, math.inf)
        with pytest.raises(InfiniteMassError):
            build_cdf(f, rel_tol=1e-8)

    def test_inverse_cdf_endpoints(self):
        f, *_ = self.gaussian_density()
        cdf = build_cdf(f, rel_tol=1e-9)
        assert inverse_cdf(cdf, 0.0) == approx(cdf.nodes[0])
        assert inverse_cdf(cdf, 1.0) == approx(cdf.nodes[-1])
        with pytest.raises(ValueError):
            inverse_cdf(cdf, 1.5)

    def test_inverse_cdf_median_matches_gammaincinv(self):
        f, n, alpha = self.gaussian_density()
        cdf = build_cdf(f, rel_tol=1e-10)
        want = math.sqrt(float(sp.gammaincinv(0.5 * n, 0.5)) * alpha**2 / 2.0)
        assert inverse_cdf(cdf, 0.5) == approx(want, rel=1e-6)

    @given(st.floats(min_value=0.0, max_value=1.0))
    @settings(max_examples=50, deadline=None)
    def test_roundtrip_within_grid_cell(self, frac):
        # r inside the grid's coverage (mass outside the grid is ~e^-700 of total)
        cdf = TestCdf._CDF_CACHE
        r = cdf.nodes[0] + frac * (1.5 - cdf.nodes[0])
        u = float(cdf.cdf(np.array([r]))[0])
        r_back = float(inverse_cdf(cdf, u))
        idx = np.searchsorted(cdf.nodes, r)
        cell = cdf.nodes[min(idx + 1, len(cdf.nodes) - 1)] - cdf.nodes[max(idx - 1, 0)]
        assert abs(r_back - r) <= max(cell, 1e-9)

    @given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=2, max_size=10))
    @settings(max_examples=50, deadline=None)
    def test_inverse_monotone(self, us):
        cdf = TestCdf._CDF_CACHE
        us = sorted(us)
        rs = inverse_cdf(cdf, np.array(us))
        assert np.all(np.diff(rs) >= -1e-15)


TestCdf._CDF_CACHE = build_cdf(TestCdf.gaussian_density()[0], rel_tol=1e-10)


class TestBesselSquared:
    @pytest.mark.parametrize("mu,lam,ref", BESSEL_SQ_REFS)
    def test_full_integral_against_frozen_closed_form(self, mu, lam, ref):
        got = bessel_sq_moment_log(mu, lam, rel_tol=1e-9)
        assert got == approx(ref, abs=5e-9)

    def test_divergent_rejected(self):
        with pytest.raises(ValueError):
            bessel_sq_moment_log(2.0, 0.0)
        with pytest.raises(ValueError):
            bessel_sq_moment_log(2.0, 6.0)

    def test_prefix_grows_to_total(self):
        mu, lam = 10.0, 2.0
        total = bessel_sq_moment_log(mu, lam, rel_tol=1e-9)
        prefixes = [bessel_sq_prefix_log(mu, lam, y) for y in (5.0, 20.0, 200.0, 4000.0)]
        assert all(a <= b + 1e-12 for a, b in zip(prefixes, prefixes[1:]))
        assert prefixes[-1] <= total + 1e-9
        assert prefixes[-1] == approx(total, abs=2e-3)  # slow algebraic tail
