"""Core containers: samples, evaluation grids, bands, envelopes, intervals.

Everything downstream works on a fixed evaluation grid that contains every
sample value (so band jumps align with grid points) plus equispaced filler
and a margin on both sides to give tail bounds room to decay.
"""

from dataclasses import dataclass

import numpy as np

__all__ = [
    "Sample",
    "Grid",
    "BandFn",
    "ConcaveEnvelope",
    "BoundsInterval",
    "Verdict",
    "build_grid",
    "eval_band",
]


@dataclass
class Sample:
    """Observed data, optionally interval-censored.

    ``values`` are the working observations (for censored data: a nominal
    point inside each interval, used only for grid placement).  When the
    observations are only known up to an interval, ``censor_lo``/``censor_hi``
    hold the interval endpoints; band constructors then use the upper
    endpoints for the lower band boundary and the lower endpoints for the
    upper one, which keeps the band valid for the true values.
    """

    values: np.ndarray
    censor_lo: np.ndarray | None = None
    censor_hi: np.ndarray | None = None

    def __post_init__(self):
        self.values = np.atleast_1d(np.asarray(self.values, dtype=np.float64))
        if self.values.size == 0:
            raise ValueError("sample is empty")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sample values must be finite")
        if (self.censor_lo is None) != (self.censor_hi is None):
            raise ValueError("censor_lo and censor_hi must be given together")
        if self.censor_lo is not None:
            self.censor_lo = np.asarray(self.censor_lo, dtype=np.float64)
            self.censor_hi = np.asarray(self.censor_hi, dtype=np.float64)
            if self.censor_lo.shape != self.values.shape or self.censor_hi.shape != self.values.shape:
                raise ValueError("censoring intervals must match the sample shape")
            if not (np.all(np.isfinite(self.censor_lo)) and np.all(np.isfinite(self.censor_hi))):
                raise ValueError("censoring intervals must be finite")
            if not np.all(self.censor_lo < self.censor_hi):
                raise ValueError("censoring intervals must satisfy lo < hi")

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def is_censored(self) -> bool:
        return self.censor_lo is not None


@dataclass
class Grid:
    """Strictly increasing evaluation points."""

    points: np.ndarray

    def __post_init__(self):
        self.points = np.atleast_1d(np.asarray(self.points, dtype=np.float64))
        if self.points.size < 2:
            raise ValueError("grid needs at least two points")
        if not np.all(np.isfinite(self.points)):
            raise ValueError("grid points must be finite")
        if not np.all(np.diff(self.points) > 0):
            raise ValueError("grid points must be strictly increasing")

    @property
    def m(self) -> int:
        return self.points.size


@dataclass
class BandFn:
    """Lower/upper confidence boundaries for a CDF, tabulated on a grid.

    Both boundaries are non-decreasing step data: the band value on
    ``[points[i], points[i+1])`` is ``lower[i]`` / ``upper[i]`` (see
    :func:`eval_band` for the conservative off-grid bracket).  Boundaries sit
    in [0, 1]; degenerate entries (upper == 0 or lower == 1) are tolerated so
    that pinched test fixtures can be represented, but every constructor in
    :mod:`blcbands.bands` produces upper > 0 and lower < 1.
    """

    grid: Grid
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=np.float64)
        self.upper = np.asarray(self.upper, dtype=np.float64)
        m = self.grid.m
        if self.lower.shape != (m,) or self.upper.shape != (m,):
            raise ValueError("band boundaries must match the grid length")
        if np.any(self.lower < -1e-12) or np.any(self.upper > 1 + 1e-12):
            raise ValueError("band boundaries must lie in [0, 1]")
        if np.any(self.lower > self.upper + 1e-12):
            raise ValueError("band lower boundary exceeds the upper one")
        if np.any(np.diff(self.lower) < -1e-12) or np.any(np.diff(self.upper) < -1e-12):
            raise ValueError("band boundaries must be non-decreasing")

    @property
    def width(self) -> np.ndarray:
        return self.upper - self.lower


@dataclass
class ConcaveEnvelope:
    """Piecewise-linear concave function given by its knots; -inf off-span."""

    knots_x: np.ndarray
    knots_y: np.ndarray

    def __post_init__(self):
        self.knots_x = np.atleast_1d(np.asarray(self.knots_x, dtype=np.float64))
        self.knots_y = np.atleast_1d(np.asarray(self.knots_y, dtype=np.float64))
        if self.knots_x.shape != self.knots_y.shape:
            raise ValueError("knot arrays must have equal length")
        if self.knots_x.size < 1:
            raise ValueError("envelope needs at least one knot")
        if not np.all(np.diff(self.knots_x) > 0):
            raise ValueError("knot abscissae must be strictly increasing")
        if not np.all(np.isfinite(self.knots_y)):
            raise ValueError("knot values must be finite")

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        out = np.interp(x, self.knots_x, self.knots_y)
        out = np.where((x < self.knots_x[0]) | (x > self.knots_x[-1]), -np.inf, out)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class BoundsInterval:
    """A certified enclosure [lo, hi]; hi may be +inf for unbounded envelopes."""

    lo: float
    hi: float

    def __post_init__(self):
        if np.isnan(self.lo) or np.isnan(self.hi):
            raise ValueError("interval endpoints must not be NaN")
        if self.lo > self.hi:
            raise ValueError(f"empty interval: lo={self.lo} > hi={self.hi}")

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def is_unbounded(self) -> bool:
        return np.isinf(self.lo) or np.isinf(self.hi)

    def contains(self, value: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= value <= self.hi + tol


@dataclass(frozen=True)
class Verdict:
    """Outcome of a pointwise scan: pass/fail plus the first violation.

    ``where`` is the abscissa of the first violating point and ``margin`` the
    (negative) amount by which the checked inequality failed there; both are
    None on a pass.  ``detail`` names which of several inequalities fired.
    """

    passed: bool
    where: float | None = None
    margin: float | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.passed


def build_grid(sample: Sample, n_fill: int = 512, margin_frac: float = 0.5) -> Grid:
    """Evaluation grid: sample values + equispaced filler + outer margins.

    The grid is the sorted union of all sample values (censoring interval
    endpoints included), ``n_fill`` equispaced points spanning
    ``[min - margin, max + margin]``, and those two span endpoints, where
    ``margin = margin_frac * data_range`` (or ``margin_frac`` itself when the
    range is below the merge resolution).  Points closer than
    ``1e-12 * max(1, span)`` are merged, sample values taking precedence.
    """
    if n_fill < 0:
        raise ValueError("n_fill must be >= 0")
    if margin_frac <= 0:
        raise ValueError("margin_frac must be > 0")
    vals = [sample.values]
    if sample.is_censored:
        vals += [sample.censor_lo, sample.censor_hi]
    xs = np.unique(np.concatenate(vals))
    x_lo, x_hi = xs[0], xs[-1]
    data_range = x_hi - x_lo
    # a proportional margin below the absolute merge tolerance would collapse
    # the whole grid onto one point, so such ranges count as degenerate too
    margin = margin_frac * data_range if data_range > 1e-12 else margin_frac
    a, b = x_lo - margin, x_hi + margin
    tol = 1e-12 * max(1.0, b - a)

    # sample values first so they survive the merge verbatim
    kept = [xs[0]]
    for v in xs[1:]:
        if v - kept[-1] >= tol:
            kept.append(v)
    extras = np.concatenate([[a, b], np.linspace(a, b, n_fill) if n_fill > 0 else []])
    pts = np.asarray(kept, dtype=np.float64)
    extras = np.sort(extras)
    keep = np.abs(extras[:, None] - pts[None, :]).min(axis=1) >= tol
    extras = extras[keep]
    if extras.size:
        dedup = np.concatenate([[True], np.diff(extras) >= tol])
        extras = extras[dedup]
    return Grid(np.sort(np.concatenate([pts, extras])))


def eval_band(band: BandFn, x):
    """Conservative band bracket at arbitrary points.

    Returns ``(lower, upper)`` where the lower boundary is carried forward
    from the last grid point <= x (0 before the grid) and the upper boundary
    backward from the first grid point >= x (1 after the grid).  For any CDF
    G with ``lower <= G <= upper`` on the grid, ``G(x)`` lies in the bracket.
    """
    x = np.asarray(x, dtype=np.float64)
    pts = band.grid.points
    i = np.searchsorted(pts, x, side="right") - 1
    lo = np.where(i >= 0, band.lower[np.clip(i, 0, pts.size - 1)], 0.0)
    j = np.searchsorted(pts, x, side="left")
    hi = np.where(j <= pts.size - 1, band.upper[np.clip(j, 0, pts.size - 1)], 1.0)
    if x.ndim == 0:
        return float(lo), float(hi)
    return lo, hi
