import math

import numpy as np
import pytest

from blcbands import (
    BandSpec,
    RefineResult,
    Sample,
    build_grid,
    ks_band,
    lipschitz_bound,
    logistic,
    massart_kappa,
    odw_band,
    refine_blc,
    tail_bound_check,
    wks_band,
)
from blcbands.core import BandFn, Grid
from blcbands.refine import _monotonize


def _pinched_logistic(num=401):
    g = Grid(np.linspace(-8.0, 8.0, num))
    F = np.asarray(logistic().cdf(g.points))
    return BandFn(g, F, F), F


class TestRefineBlc:
    def test_pinched_logistic_is_fixpoint(self):
        # an exact CDF with the right shape passes through unchanged
        band, F = _pinched_logistic()
        res = refine_blc(band)
        assert res.feasible and res.converged
        assert res.iterations == 1
        np.testing.assert_allclose(res.band.lower, F, rtol=0, atol=1e-15)
        np.testing.assert_allclose(res.band.upper, F, rtol=0, atol=1e-15)

    def test_two_point_staircase_infeasible(self):
        # a pinched two-atom staircase admits no admissible CDF: the flat
        # stretch at 1/2 between the jumps cannot be log-concave
        x = np.array([-0.5, 0.0, 0.25, 0.5, 0.75, 1.0, 1.5])
        F = np.array([0.0, 0.5, 0.5, 0.5, 0.5, 1.0, 1.0])
        res = refine_blc(BandFn(Grid(x), F, F))
        assert isinstance(res, RefineResult)
        assert not res.feasible
        assert res.band is None
        assert not res.converged

    def test_trivial_band_unchanged(self):
        g = Grid(np.linspace(0.0, 1.0, 5))
        res = refine_blc(BandFn(g, np.zeros(5), np.ones(5)))
        assert res.feasible and res.converged and res.iterations == 1
        assert np.all(res.band.lower == 0.0)
        assert np.all(res.band.upper == 1.0)

    def test_nested_and_strictly_tighter(self, normal_ks_refined):
        raw, res = normal_ks_refined
        assert res.converged
        assert np.all(res.band.lower >= raw.lower - 1e-12)
        assert np.all(res.band.upper <= raw.upper + 1e-12)
        gain_lo = float(np.max(res.band.lower - raw.lower))
        gain_hi = float(np.max(raw.upper - res.band.upper))
        assert max(gain_lo, gain_hi) > 1e-3

    def test_idempotent(self, normal_ks_refined):
        _, res = normal_ks_refined
        again = refine_blc(res.band)
        assert again.feasible and again.converged
        assert again.iterations == 1
        np.testing.assert_allclose(again.band.lower, res.band.lower, atol=1e-9)
        np.testing.assert_allclose(again.band.upper, res.band.upper, atol=1e-9)

    def test_preserves_admissible_truth(self):
        # when the generating CDF has the required shape and sits inside the
        # raw band, refinement must not expel it
        rng = np.random.default_rng(2025)
        dist = logistic()
        sample = Sample(dist.sampler(rng, 150))
        grid = build_grid(sample, n_fill=128)
        band = ks_band(sample, BandSpec("KS", 0.05, massart_kappa(0.05)), grid)
        truth = np.asarray(dist.cdf(grid.points))
        assert np.all(band.lower <= truth) and np.all(truth <= band.upper)
        res = refine_blc(band)
        assert res.feasible
        assert np.all(res.band.lower <= truth + 1e-12)
        assert np.all(res.band.upper >= truth - 1e-12)

    @pytest.mark.parametrize("kind", ["KS", "WKS", "ODW"])
    def test_random_bands_nest_and_stay_monotone(self, kind):
        builder = {"KS": ks_band, "WKS": wks_band, "ODW": odw_band}[kind]
        rng = np.random.default_rng(55)
        for _ in range(5):
            sample = Sample(rng.normal(0, 1, 60))
            band = builder(sample, BandSpec(kind, 0.1, 1.2), build_grid(sample, 64))
            res = refine_blc(band)
            assert res.feasible
            assert np.all(np.diff(res.band.lower) >= 0)
            assert np.all(np.diff(res.band.upper) >= 0)
            assert np.all(res.band.lower >= band.lower - 1e-12)
            assert np.all(res.band.upper <= band.upper + 1e-12)
            assert np.all(res.band.lower <= res.band.upper)

    def test_rejects_bad_controls(self):
        band, _ = _pinched_logistic(11)
        with pytest.raises(ValueError):
            refine_blc(band, max_iter=0)
        with pytest.raises(ValueError):
            refine_blc(band, tol=0.0)


class TestMonotonize:
    def test_canonicalizes_negative_zero(self):
        L, U = _monotonize(np.array([-0.0, 0.5]), np.array([0.5, 1.0]), "t")
        assert math.copysign(1.0, L[0]) == 1.0

    def test_small_wobble_repaired(self):
        L, U = _monotonize(
            np.array([0.2, 0.2 - 1e-12]), np.array([0.5, 0.5 + 1e-12]), "t"
        )
        assert np.all(np.diff(L) >= 0) and np.all(np.diff(U) >= 0)

    def test_large_wobble_raises(self):
        with pytest.raises(RuntimeError):
            _monotonize(np.array([0.5, 0.2]), np.array([0.6, 0.9]), "t")
        with pytest.raises(RuntimeError):
            _monotonize(np.array([0.1, 0.6]), np.array([0.5, 0.5]), "t")


class TestLipschitzBound:
    def test_formula(self):
        band, _ = _pinched_logistic()
        # lower(-1) = F(-1) ~ 0.269 >= 0.25, upper(1) = F(1) ~ 0.731 <= 0.75
        c = lipschitz_bound(band, -1.0, 1.0, 0.25, 0.75)
        assert c == pytest.approx(math.log(3.0) / 2.0, abs=1e-15)

    def test_bounds_refined_grid_slopes(self, normal_ks_refined):
        _, res = normal_ks_refined
        band = res.band
        pts = band.grid.points
        # pick anchors from the refined band itself
        i_a = int(np.argmax(band.lower >= 0.25))
        i_b = len(pts) - 1 - int(np.argmax((band.upper <= 0.75)[::-1]))
        a, b = pts[i_a], pts[i_b]
        c = lipschitz_bound(band, a, b, 0.25, 0.75)
        slopes_lo = np.diff(band.lower) / np.diff(pts)
        slopes_hi = np.diff(band.upper) / np.diff(pts)
        assert slopes_lo.max() <= c + 1e-9
        assert slopes_hi.max() <= c + 1e-9
        # and the true maximal density of any admissible CDF is below it
        assert c >= 0.25

    def test_anchor_violations_raise(self):
        band, _ = _pinched_logistic()
        with pytest.raises(ValueError):
            lipschitz_bound(band, 1.0, -1.0, 0.25, 0.75)
        with pytest.raises(ValueError):
            lipschitz_bound(band, -1.0, 1.0, 0.75, 0.25)
        with pytest.raises(ValueError):
            # lower(-3) ~ 0.047 < 0.25
            lipschitz_bound(band, -3.0, 1.0, 0.25, 0.75)
        with pytest.raises(ValueError):
            # upper(3) ~ 0.95 > 0.75
            lipschitz_bound(band, -1.0, 3.0, 0.25, 0.75)


class TestTailBoundCheck:
    def test_admissible_cdf_passes(self):
        band, _ = _pinched_logistic()
        v = tail_bound_check(band, -1.0, 1.0, 0.3, 0.7)
        assert v.passed

    def test_refined_band_passes(self, normal_ks_refined):
        _, res = normal_ks_refined
        band = res.band
        pts = band.grid.points
        i_a = int(np.argmax(band.upper >= 0.3)) - 1
        i_b = int(np.argmax(band.lower >= 0.7))
        a, b = pts[i_a], pts[i_b]
        r = float(band.upper[i_a])
        s = float(band.lower[i_b])
        assert tail_bound_check(band, a, b, r, s).passed

    def test_flat_upper_tail_fails(self):
        g = Grid(np.linspace(-8.0, 8.0, 401))
        F = np.asarray(logistic().cdf(g.points))
        heavy = BandFn(g, F, np.maximum(F, 0.25))
        v = tail_bound_check(heavy, -1.0, 1.0, 0.3, 0.7)
        assert not v.passed
        assert v.detail == "upper tail"
        assert v.where < -1.0

    def test_flat_lower_tail_fails(self):
        g = Grid(np.linspace(-8.0, 8.0, 401))
        F = np.asarray(logistic().cdf(g.points))
        heavy = BandFn(g, np.minimum(F, 0.75), F)
        v = tail_bound_check(heavy, -1.0, 1.0, 0.3, 0.7)
        assert not v.passed
        assert v.detail == "lower tail"
        assert v.where > 1.0

    def test_anchor_violations_raise(self):
        band, _ = _pinched_logistic()
        with pytest.raises(ValueError):
            # upper(-1) ~ 0.269 > 0.2
            tail_bound_check(band, -1.0, 1.0, 0.2, 0.7)
        with pytest.raises(ValueError):
            # lower(1) ~ 0.731 < 0.8
            tail_bound_check(band, -1.0, 1.0, 0.3, 0.8)
