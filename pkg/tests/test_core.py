import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blcbands import (
    BandFn,
    BoundsInterval,
    ConcaveEnvelope,
    Grid,
    Sample,
    Verdict,
    build_grid,
    eval_band,
)


class TestSample:
    def test_basic(self):
        s = Sample([3.0, 1.0, 2.0])
        assert s.n == 3
        assert not s.is_censored

    def test_censored(self):
        s = Sample([1.0, 2.0], censor_lo=[0.5, 1.5], censor_hi=[1.5, 2.5])
        assert s.is_censored
        assert s.n == 2

    def test_rejects_bad_intervals(self):
        with pytest.raises(ValueError):
            Sample([1.0], censor_lo=[2.0], censor_hi=[1.0])
        with pytest.raises(ValueError):
            Sample([1.0, 2.0], censor_lo=[0.5], censor_hi=[1.5, 2.5])
        with pytest.raises(ValueError):
            Sample([np.nan])

    def test_rejects_partial_censoring(self):
        with pytest.raises(ValueError):
            Sample([1.0], censor_lo=[0.5], censor_hi=None)


class TestGrid:
    def test_strictly_increasing_required(self):
        with pytest.raises(ValueError):
            Grid([0.0, 0.0, 1.0])
        with pytest.raises(ValueError):
            Grid([1.0])
        with pytest.raises(ValueError):
            Grid([0.0, np.inf])

    def test_m(self):
        assert Grid([0.0, 1.0, 2.0]).m == 3


class TestBandFn:
    def test_valid(self):
        g = Grid([0.0, 1.0, 2.0])
        b = BandFn(g, [0.0, 0.2, 0.5], [0.5, 0.8, 1.0])
        assert np.allclose(b.width, [0.5, 0.6, 0.5])

    def test_rejects_crossing(self):
        g = Grid([0.0, 1.0])
        with pytest.raises(ValueError):
            BandFn(g, [0.6, 0.7], [0.5, 1.0])

    def test_rejects_decreasing(self):
        g = Grid([0.0, 1.0])
        with pytest.raises(ValueError):
            BandFn(g, [0.5, 0.2], [0.8, 1.0])

    def test_rejects_out_of_range(self):
        g = Grid([0.0, 1.0])
        with pytest.raises(ValueError):
            BandFn(g, [-0.2, 0.0], [0.5, 1.0])
        with pytest.raises(ValueError):
            BandFn(g, [0.0, 0.1], [0.5, 1.2])

    def test_pinched_allowed(self):
        g = Grid([0.0, 1.0, 2.0])
        f = np.array([0.1, 0.5, 0.9])
        b = BandFn(g, f, f)
        assert np.all(b.width == 0.0)


class TestBuildGrid:
    def test_contains_sample_values_verbatim(self):
        s = Sample([0.3, -1.2, 2.7])
        g = build_grid(s, n_fill=16)
        for v in s.values:
            assert v in g.points

    def test_margin(self):
        s = Sample([0.0, 2.0])
        g = build_grid(s, n_fill=8, margin_frac=0.5)
        assert g.points[0] == -1.0
        assert g.points[-1] == 3.0

    def test_zero_range_sample(self):
        # all observations equal: margin falls back to an absolute offset
        s = Sample([1.0, 1.0, 1.0])
        g = build_grid(s, n_fill=8, margin_frac=0.5)
        assert g.points[0] < 1.0 < g.points[-1]

    def test_sub_tolerance_range_sample(self):
        # a range below the merge resolution must get the same absolute
        # margin as a zero range instead of collapsing to one grid point
        s = Sample([0.0, 3e-93])
        g = build_grid(s, n_fill=8, margin_frac=0.5)
        assert g.m >= 2
        assert g.points[0] == -0.5
        assert g.points[-1] >= 0.5

    def test_censored_endpoints_in_grid(self):
        s = Sample([1.0], censor_lo=[0.5], censor_hi=[1.5])
        g = build_grid(s, n_fill=8)
        assert 0.5 in g.points and 1.5 in g.points

    @given(
        st.lists(
            st.floats(-50, 50).filter(lambda v: abs(v) > 1e-9),
            min_size=1,
            max_size=20,
            unique=True,
        ),
        st.integers(4, 64),
    )
    @settings(max_examples=50, deadline=None)
    def test_properties(self, values, n_fill):
        g = build_grid(Sample(values), n_fill=n_fill)
        assert np.all(np.diff(g.points) > 0)
        assert g.points[0] <= min(values)
        assert g.points[-1] >= max(values)


class TestEvalBand:
    def test_at_grid_points(self):
        g = Grid([0.0, 1.0, 2.0])
        b = BandFn(g, [0.0, 0.2, 0.5], [0.5, 0.8, 1.0])
        lo, hi = eval_band(b, np.array([0.0, 1.0, 2.0]))
        assert np.all(lo == b.lower) and np.all(hi == b.upper)

    def test_conservative_between(self):
        g = Grid([0.0, 1.0])
        b = BandFn(g, [0.1, 0.4], [0.5, 0.9])
        lo, hi = eval_band(b, 0.5)
        assert lo == 0.1  # last grid point at or below
        assert hi == 0.9  # first grid point at or above

    def test_outside_grid(self):
        g = Grid([0.0, 1.0])
        b = BandFn(g, [0.1, 0.4], [0.5, 0.9])
        lo, hi = eval_band(b, np.array([-5.0, 5.0]))
        assert lo[0] == 0.0 and hi[0] == 0.5
        assert lo[1] == 0.4 and hi[1] == 1.0


class TestBoundsInterval:
    def test_contains_and_width(self):
        b = BoundsInterval(1.0, 2.0)
        assert b.contains(1.5)
        assert not b.contains(2.5)
        assert b.width == 1.0
        assert not b.is_unbounded

    def test_unbounded(self):
        assert BoundsInterval(0.0, math.inf).is_unbounded
        assert BoundsInterval(0.0, math.inf).width == math.inf

    def test_rejects_inverted_or_nan(self):
        with pytest.raises(ValueError):
            BoundsInterval(2.0, 1.0)
        with pytest.raises(ValueError):
            BoundsInterval(math.nan, 1.0)


class TestConcaveEnvelope:
    def test_interp_and_outside(self):
        env = ConcaveEnvelope(np.array([0.0, 1.0, 2.0]), np.array([0.0, 1.0, 0.0]))
        assert env(0.5) == 0.5
        assert env(-0.1) == -math.inf
        assert env(2.1) == -math.inf


class TestVerdict:
    def test_truthiness(self):
        assert Verdict(True)
        assert not Verdict(False, where=1.0, margin=-0.1, detail="upper")
