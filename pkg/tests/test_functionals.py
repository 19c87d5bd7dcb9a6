import math

import numpy as np
import pytest

from blcbands import (
    LogLinearBand,
    RefineResult,
    Sample,
    BandSpec,
    band_to_loglinear,
    build_grid,
    exponential,
    hazard_envelope,
    ks_band,
    loglinear_from_band,
    logistic,
    massart_kappa,
    mgf_bounds,
    moment_bounds,
    normal,
    t1_t2,
)
from blcbands.core import BandFn, Grid

from _oracles import curve_lower, curve_upper, riemann_mgf, riemann_moment

PI2_3 = math.pi**2 / 3.0


def _logistic_mgf(t):
    return math.pi * t / math.sin(math.pi * t)


def _pinched_logistic_llb(num=401):
    x = np.linspace(-8.0, 8.0, num)
    F = np.asarray(logistic().cdf(x))
    return loglinear_from_band(BandFn(Grid(x), F, F))


@pytest.fixture(scope="module")
def refined_llb(normal_ks_refined):
    _, res = normal_ks_refined
    return band_to_loglinear(res)


class TestLogLinearBand:
    def test_validation(self):
        g = Grid([0.0, 1.0])
        with pytest.raises(ValueError):
            LogLinearBand(g, [0.0, 0.5, 0.6], [0.5, 1.0], 1.0, 1.0)
        with pytest.raises(ValueError):
            LogLinearBand(g, [0.6, 0.7], [0.5, 1.0], 1.0, 1.0)
        with pytest.raises(ValueError):
            LogLinearBand(g, [0.5, 0.4], [0.6, 0.9], 1.0, 1.0)
        with pytest.raises(ValueError):
            LogLinearBand(g, [0.1, 0.5], [0.5, 1.0], 0.0, 1.0)
        with pytest.raises(ValueError):
            LogLinearBand(g, [0.1, 0.5], [0.5, 1.0], 1.0, -2.0)
        with pytest.raises(ValueError):
            LogLinearBand(g, [0.1, 0.5], [0.5, 1.0], math.inf, 1.0)

    def test_rate_extraction_from_exact_cdf(self):
        # both logistic log-boundary slopes approach 1 at the grid ends
        llb = _pinched_logistic_llb()
        assert llb.rate_left == pytest.approx(1.0, abs=1e-3)
        assert llb.rate_right == pytest.approx(1.0, abs=1e-3)
        assert llb.rate_left == pytest.approx(0.9996578548800308, abs=1e-12)

    def test_refined_band_has_positive_rates(self, refined_llb):
        assert refined_llb.rate_left > 0
        assert refined_llb.rate_right > 0

    def test_flat_tail_rejected_left(self):
        # an unrefined band is constant near its ends, so no exponential
        # tail rate can be read off
        rng = np.random.default_rng(3)
        sample = Sample(rng.normal(0, 1, 50))
        raw = ks_band(sample, BandSpec("KS", 0.1, massart_kappa(0.1)))
        with pytest.raises(ValueError, match="rate_left"):
            loglinear_from_band(raw)

    def test_flat_tail_rejected_right(self):
        g = Grid([0.0, 1.0, 2.0])
        band = BandFn(g, [0.0, 0.2, 0.2], [0.5, 1.0, 1.0])
        with pytest.raises(ValueError, match="rate_right"):
            loglinear_from_band(band)

    def test_infeasible_result_rejected(self):
        res = RefineResult(False, None, 1, False)
        with pytest.raises(ValueError):
            band_to_loglinear(res)


class TestMgfBounds:
    def test_zero_is_exact(self, refined_llb):
        r = mgf_bounds(refined_llb, 0.0)
        assert (r.lo, r.hi) == (1.0, 1.0)

    @pytest.mark.parametrize("t", [-0.25, 0.25, 0.5])
    def test_pinched_logistic_near_exact(self, t):
        llb = _pinched_logistic_llb()
        r = mgf_bounds(llb, t)
        # the enclosure is over CDFs between the completed curves; the
        # analytic CDF crosses those curves by the interpolation error, so
        # containment holds only up to that scale
        assert r.contains(_logistic_mgf(t), tol=5e-5)
        assert r.width < 2e-2

    def test_symmetry_of_pinched_logistic(self):
        llb = _pinched_logistic_llb()
        r_pos, r_neg = mgf_bounds(llb, 0.25), mgf_bounds(llb, -0.25)
        assert r_pos.lo == pytest.approx(r_neg.lo, rel=1e-12)
        assert r_pos.hi == pytest.approx(r_neg.hi, rel=1e-12)

    @pytest.mark.parametrize("t", [0.3, -0.3])
    def test_matches_riemann_oracle(self, refined_llb, t):
        r = mgf_bounds(refined_llb, t)
        if t > 0:
            lo_oracle = riemann_mgf(refined_llb, t, curve_upper, n_mesh=100_000)
            hi_oracle = riemann_mgf(refined_llb, t, curve_lower, n_mesh=100_000)
        else:
            lo_oracle = riemann_mgf(refined_llb, t, curve_lower, n_mesh=100_000)
            hi_oracle = riemann_mgf(refined_llb, t, curve_upper, n_mesh=100_000)
        assert r.lo == pytest.approx(lo_oracle, rel=1e-4)
        assert r.hi == pytest.approx(hi_oracle, rel=1e-4)

    def test_monotone_in_band_width(self, normal_ks_refined):
        # widening the band can only widen the functional enclosure
        _, res = normal_ks_refined
        tight = band_to_loglinear(res)
        slack_lower = np.maximum(tight.lower - 0.02, 0.0)
        slack_upper = np.minimum(tight.upper + 0.02, 1.0)
        wide = LogLinearBand(
            tight.grid, slack_lower, slack_upper, tight.rate_left, tight.rate_right
        )
        for t in (-0.2, 0.4):
            r_t, r_w = mgf_bounds(tight, t), mgf_bounds(wide, t)
            assert r_w.lo <= r_t.lo + 1e-12
            assert r_w.hi >= r_t.hi - 1e-12

    def test_nonintegrable_t_raises(self, refined_llb):
        with pytest.raises(ValueError, match="rate_right"):
            mgf_bounds(refined_llb, refined_llb.rate_right)
        with pytest.raises(ValueError, match="rate_left"):
            mgf_bounds(refined_llb, -refined_llb.rate_left)


class TestMomentBounds:
    def test_pinched_logistic_mean_and_variance(self):
        llb = _pinched_logistic_llb(4001)
        m1 = moment_bounds(llb, 1)
        assert m1.contains(0.0)
        assert m1.width < 1e-3
        m2 = moment_bounds(llb, 2)
        assert m2.contains(PI2_3, tol=1e-4)
        assert m2.hi == pytest.approx(PI2_3, abs=1e-3)

    def test_matches_riemann_oracle_first_moment(self, refined_llb):
        # phi' = 1 >= 0 everywhere: each endpoint is a single-curve integral
        r = moment_bounds(refined_llb, 1)
        lo_oracle = riemann_moment(refined_llb, 1, 0.0, curve_upper, n_mesh=100_000)
        hi_oracle = riemann_moment(refined_llb, 1, 0.0, curve_lower, n_mesh=100_000)
        assert r.lo == pytest.approx(lo_oracle, abs=1e-4)
        assert r.hi == pytest.approx(hi_oracle, abs=1e-4)

    def test_matches_riemann_oracle_pure_sign_quadratic(self, refined_llb):
        # with the center far left of the mass, phi' keeps one sign on every
        # piece that matters, so the endpoints are again single-curve
        c = float(refined_llb.grid.points[0]) - 30.0
        r = moment_bounds(refined_llb, 2, center=c)
        lo_oracle = riemann_moment(refined_llb, 2, c, curve_upper, n_mesh=100_000)
        hi_oracle = riemann_moment(refined_llb, 2, c, curve_lower, n_mesh=100_000)
        assert r.lo == pytest.approx(lo_oracle, rel=1e-4)
        assert r.hi == pytest.approx(hi_oracle, rel=1e-4)

    def test_conservative_for_mixed_sign_quadratic(self, refined_llb):
        # center inside the support: the enclosure must contain the values of
        # both completed curves (it may be strictly wider)
        r = moment_bounds(refined_llb, 2, center=0.3)
        for curve in (curve_upper, curve_lower):
            val = riemann_moment(refined_llb, 2, 0.3, curve, n_mesh=100_000)
            assert r.lo - 1e-6 <= val <= r.hi + 1e-6

    def test_rejects_bad_k(self, refined_llb):
        with pytest.raises(ValueError):
            moment_bounds(refined_llb, 0)
        with pytest.raises(ValueError):
            moment_bounds(refined_llb, 1.5)


class TestHazardEnvelope:
    def test_pinched_logistic_tight_at_center(self):
        x = np.linspace(-8.0, 8.0, 401)
        F = np.asarray(logistic().cdf(x))
        band = BandFn(Grid(x), F, F)
        rh = hazard_envelope(band, 0.0, "reverse_hazard")
        assert rh.contains(0.5)
        assert rh.width < 0.02
        hz = hazard_envelope(band, 0.0, "hazard")
        assert hz.contains(0.5)
        assert hz.width < 0.02

    def test_contains_truth_for_sampled_band(self, normal_ks_refined):
        _, res = normal_ks_refined
        d = normal()
        for x in (-1.0, 0.0, 1.0):
            hz = hazard_envelope(res.band, x, "hazard")
            true_h = float(d.pdf(x) / d.sf(x))
            assert hz.contains(true_h, tol=1e-12)
            rh = hazard_envelope(res.band, x, "reverse_hazard")
            true_r = float(d.pdf(x) / d.cdf(x))
            assert rh.contains(true_r, tol=1e-12)

    def test_refinement_shrinks_envelope(self, normal_ks_refined):
        raw, res = normal_ks_refined
        for x in (-1.5, 0.0, 1.5):
            for kind in ("hazard", "reverse_hazard"):
                wide = hazard_envelope(raw, x, kind)
                tight = hazard_envelope(res.band, x, kind)
                assert tight.lo >= wide.lo - 1e-12
                assert tight.hi <= wide.hi + 1e-12

    def test_uninformative_band_is_unbounded(self):
        g = Grid(np.linspace(0.0, 1.0, 9))
        band = BandFn(g, np.zeros(9), np.ones(9))
        r = hazard_envelope(band, 0.5, "hazard")
        assert (r.lo, r.hi) == (0.0, math.inf)
        assert r.is_unbounded

    def test_rejects_bad_args(self, normal_ks_refined):
        _, res = normal_ks_refined
        pts = res.band.grid.points
        with pytest.raises(ValueError):
            hazard_envelope(res.band, float(pts[0]), "hazard")
        with pytest.raises(ValueError):
            hazard_envelope(res.band, float(pts[-1]) + 1.0, "hazard")
        with pytest.raises(ValueError):
            hazard_envelope(res.band, 0.0, "inverse_hazard")


class TestT1T2:
    def test_normal_frozen(self):
        g = np.linspace(-8.0, 8.0, 1601)
        t1, t2 = t1_t2(normal(), g)
        assert t1 == pytest.approx(8.121368112236054, abs=1e-12)
        assert t2 == t1

    def test_logistic_approaches_one(self):
        g = np.linspace(-8.0, 8.0, 1601)
        t1, t2 = t1_t2(logistic(), g)
        assert t1 == pytest.approx(1.0, abs=1e-3)
        assert t2 == pytest.approx(1.0, abs=1e-3)

    def test_exponential_left_bounded_support(self):
        t1, t2 = t1_t2(exponential(), np.linspace(0.1, 10.0, 100))
        assert t1 == math.inf
        assert t2 == 1.0

    def test_accepts_grid_object(self):
        g = Grid(np.linspace(-2.0, 2.0, 41))
        t1, t2 = t1_t2(normal(), g)
        assert t1 == pytest.approx(float(normal().pdf(-2.0) / normal().cdf(-2.0)))

    def test_rejects_grid_outside_support(self):
        with pytest.raises(ValueError):
            t1_t2(exponential(), np.linspace(-1.0, 5.0, 10))
