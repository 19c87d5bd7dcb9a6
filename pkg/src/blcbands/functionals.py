"""Functional confidence bounds derived from a (refined) band.

A refined band has boundaries of the form ``exp(piecewise linear)`` in
``upper`` and ``1 - exp(piecewise linear)`` in ``1 - lower``, so the band is
completed off-grid by log-linear interpolation and exponential tails
(:class:`LogLinearBand`).  Every bound here is an exact closed-form integral
against those completed curves:

* :func:`mgf_bounds`   -- enclosure of ``int exp(tx) dG`` over CDFs G in the
  band, via ``MGF(t) = int t e^{tx} (1 - G(x)) dx`` for t > 0 and the mirror
  identity for t < 0;
* :func:`moment_bounds` -- enclosure of ``int (x - center)^k dG`` via the
  identity ``int phi dG = phi(0) + int phi'(x) (1_{x>=0} - G(x)) dx``,
  selecting the extremal boundary sign-region by sign-region (conservative
  when ``phi'`` changes sign);
* :func:`hazard_envelope` -- pointwise hazard / reverse-hazard bounds for all
  bi-log-concave CDFs in the band, from secants of the log boundaries;
* :func:`t1_t2` -- suprema of reverse hazard and hazard of an analytic
  distribution (the MGF of a bi-log-concave F is finite on (-T1, T2)).
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import BandFn, BoundsInterval, Grid
from .families import AnalyticDist
from .refine import RefineResult

__all__ = [
    "LogLinearBand",
    "band_to_loglinear",
    "loglinear_from_band",
    "mgf_bounds",
    "moment_bounds",
    "hazard_envelope",
    "t1_t2",
]


@dataclass
class LogLinearBand:
    """Band values on a grid plus the tail rates that complete them on R.

    Off-grid the boundaries are interpolated log-linearly (``log upper`` and
    ``log(1 - lower)`` linear between grid points) and extended by
    exponential tails: ``upper(x) = upper[0] * exp(rate_left * (x - t0))``
    left of the grid and ``1 - lower(x) = (1 - lower[m]) * exp(-rate_right *
    (x - tm))`` right of it.  Leading ``upper = 0`` / trailing ``lower = 1``
    entries are permitted (pinched fixtures); the adjacent transition segment
    is completed by a conservative constant instead of a log-linear piece.
    """

    grid: Grid
    lower: np.ndarray
    upper: np.ndarray
    rate_left: float
    rate_right: float

    def __post_init__(self):
        self.lower = np.asarray(self.lower, dtype=np.float64)
        self.upper = np.asarray(self.upper, dtype=np.float64)
        m = self.grid.m
        if self.lower.shape != (m,) or self.upper.shape != (m,):
            raise ValueError("boundaries must match the grid length")
        if np.any(self.lower < 0) or np.any(self.upper > 1):
            raise ValueError("boundaries must lie in [0, 1]")
        if np.any(self.lower > self.upper):
            raise ValueError("lower boundary exceeds the upper one")
        if np.any(np.diff(self.lower) < 0) or np.any(np.diff(self.upper) < 0):
            raise ValueError("boundaries must be non-decreasing")
        if not (np.isfinite(self.rate_left) and self.rate_left > 0):
            raise ValueError("rate_left must be positive and finite")
        if not (np.isfinite(self.rate_right) and self.rate_right > 0):
            raise ValueError("rate_right must be positive and finite")


def band_to_loglinear(result: RefineResult) -> LogLinearBand:
    """Attach tail rates to a feasible refined band.

    ``rate_left`` is the slope of ``log upper`` over the first grid segment
    with both values positive, ``rate_right`` the negated slope of
    ``log(1 - lower)`` over the last segment with both values below 1; a
    non-positive extracted rate means the band lacks an exponential tail
    (e.g. an unrefined band that is constant near its ends) and is an error.
    """
    if not result.feasible:
        raise ValueError("cannot build a log-linear band from an infeasible result")
    return loglinear_from_band(result.band)


def loglinear_from_band(band: BandFn) -> LogLinearBand:
    """``band_to_loglinear`` for a band that is already known to be valid
    (refined output reloaded from a file, or an exact-CDF fixture)."""
    pts = band.grid.points
    L, U = band.lower, band.upper

    pos = np.flatnonzero((U[:-1] > 0) & (U[1:] > 0))
    rate_left = np.nan
    if pos.size:
        i = int(pos[0])
        rate_left = (math.log(U[i + 1]) - math.log(U[i])) / (pts[i + 1] - pts[i])
    if not (np.isfinite(rate_left) and rate_left > 0):
        raise ValueError("band lacks exponential tail on the left (rate_left <= 0)")

    below = np.flatnonzero((L[:-1] < 1) & (L[1:] < 1))
    rate_right = np.nan
    if below.size:
        i = int(below[-1])
        rate_right = (math.log1p(-L[i]) - math.log1p(-L[i + 1])) / (pts[i + 1] - pts[i])
    if not (np.isfinite(rate_right) and rate_right > 0):
        raise ValueError("band lacks exponential tail on the right (rate_right <= 0)")

    return LogLinearBand(band.grid, L.copy(), U.copy(), rate_left, rate_right)


# A completed boundary curve is a list of pieces (x0, x1, c0, c1, rho, xref)
# meaning value(x) = c0 + c1 * exp(rho * (x - xref)) on [x0, x1].


def _upper_curve(band: LogLinearBand):
    pts = band.grid.points
    U = band.upper
    pieces = [(-math.inf, pts[0], 0.0, float(U[0]), band.rate_left, pts[0])]
    for i in range(pts.size - 1):
        a, b = pts[i], pts[i + 1]
        if U[i + 1] <= 0.0:
            pieces.append((a, b, 0.0, 0.0, 0.0, a))
        elif U[i] <= 0.0:
            # transition segment out of the pinned-zero region: the least
            # valid constant dominating every CDF below U on the grid
            pieces.append((a, b, float(U[i + 1]), 0.0, 0.0, a))
        else:
            rho = (math.log(U[i + 1]) - math.log(U[i])) / (b - a)
            pieces.append((a, b, 0.0, float(U[i]), rho, a))
    pieces.append((pts[-1], math.inf, 1.0, 0.0, 0.0, pts[-1]))
    return pieces


def _lower_curve(band: LogLinearBand):
    pts = band.grid.points
    L = band.lower
    pieces = [(-math.inf, pts[0], 0.0, 0.0, 0.0, pts[0])]
    for i in range(pts.size - 1):
        a, b = pts[i], pts[i + 1]
        if L[i] >= 1.0:
            pieces.append((a, b, 1.0, 0.0, 0.0, a))
        elif L[i + 1] >= 1.0:
            pieces.append((a, b, float(L[i]), 0.0, 0.0, a))
        else:
            rho = (math.log1p(-L[i + 1]) - math.log1p(-L[i])) / (b - a)
            pieces.append((a, b, 1.0, -(1.0 - float(L[i])), rho, a))
    pieces.append((pts[-1], math.inf, 1.0, -(1.0 - float(L[-1])), -band.rate_right, pts[-1]))
    return pieces


def _exp_piece_integral(x0, x1, s, rho, xref):
    """``int_{x0}^{x1} exp(s*x + rho*(x - xref)) dx`` with infinite endpoints
    allowed when the combined rate makes the integral converge."""
    rate = s + rho
    if x0 == -math.inf:
        if not rate > 0:
            raise RuntimeError("divergent left-tail integral")
        return math.exp(s * x1 + rho * (x1 - xref)) / rate
    if x1 == math.inf:
        if not rate < 0:
            raise RuntimeError("divergent right-tail integral")
        return -math.exp(s * x0 + rho * (x0 - xref)) / rate
    base = math.exp(s * x0 + rho * (x0 - xref))
    d = x1 - x0
    if rate == 0.0:
        return base * d
    return base * math.expm1(rate * d) / rate


def _mgf_one_side(pieces, t, one_minus):
    """``int |t| e^{tx} H(x) dx`` where H is a completed boundary curve
    (``one_minus=False``) or 1 minus it (``one_minus=True``)."""
    total = 0.0
    for x0, x1, c0, c1, rho, xref in pieces:
        n0 = 1.0 - c0 if one_minus else c0
        n1 = -c1 if one_minus else c1
        if n0 != 0.0:
            # xref 0 keeps rho*(x - xref) well-defined on infinite pieces
            total += n0 * _exp_piece_integral(x0, x1, t, 0.0, 0.0)
        if n1 != 0.0:
            total += n1 * _exp_piece_integral(x0, x1, t, rho, xref)
    return abs(t) * total


def mgf_bounds(band: LogLinearBand, t: float) -> BoundsInterval:
    """Enclosure of the moment generating function at t over the band.

    Uses ``MGF(t) = int t e^{tx} (1 - G(x)) dx`` (t > 0): the infimum
    substitutes the completed upper boundary for G, the supremum the lower
    one; for t < 0 the identity ``MGF(t) = int |t| e^{tx} G(x) dx`` swaps the
    roles.  Convergence requires ``t < rate_right`` (t > 0) resp.
    ``|t| < rate_left`` (t < 0); ``t = 0`` returns (1, 1).
    """
    if t == 0.0:
        return BoundsInterval(1.0, 1.0)
    if t > 0 and t >= band.rate_right:
        raise ValueError(
            f"t={t} is not integrable against the lower tail (rate_right={band.rate_right})"
        )
    if t < 0 and -t >= band.rate_left:
        raise ValueError(
            f"t={t} is not integrable against the upper tail (rate_left={band.rate_left})"
        )
    up = _upper_curve(band)
    low = _lower_curve(band)
    if t > 0:
        return BoundsInterval(_mgf_one_side(up, t, True), _mgf_one_side(low, t, True))
    return BoundsInterval(_mgf_one_side(low, t, False), _mgf_one_side(up, t, False))


def _split_pieces(pieces, cuts):
    """Split curve pieces at interior cut points (keeps piece params)."""
    out = []
    for x0, x1, c0, c1, rho, xref in pieces:
        inner = sorted(c for c in cuts if x0 < c < x1)
        lo = x0
        for c in inner:
            out.append((lo, c, c0, c1, rho, xref))
            lo = c
        out.append((lo, x1, c0, c1, rho, xref))
    return out


def _exp_moments(h, rho, top_degree):
    """``M_j = int_0^h y^j exp(rho*y) dy`` for j = 0..top_degree."""
    out = []
    z = rho * h
    if rho == 0.0:
        return [h ** (j + 1) / (j + 1) for j in range(top_degree + 1)]
    if abs(z) < 1e-4:
        # short series in rho: the closed recurrence cancels badly here
        for j in range(top_degree + 1):
            acc = 0.0
            fact = 1.0
            for i in range(8):
                if i > 0:
                    fact *= i
                acc += rho**i * h ** (i + j + 1) / (fact * (i + j + 1))
            out.append(acc)
        return out
    m = math.expm1(z) / rho
    out.append(m)
    ez = math.exp(z)
    for j in range(1, top_degree + 1):
        m = (h**j * ez - j * m) / rho
        out.append(m)
    return out


def _poly_exp_integral(x0, x1, rho, xref, k, center):
    """``int_{x0}^{x1} phi'(x) exp(rho*(x - xref)) dx`` for
    ``phi(x) = (x - center)^k``."""
    deg = k - 1
    if x0 == -math.inf:
        if not rho > 0:
            raise RuntimeError("divergent left-tail moment integral")
        # substitute y = x1 - x
        scale = math.exp(rho * (x1 - xref))
        total = 0.0
        for j in range(deg + 1):
            b = k * math.comb(deg, j) * (x1 - center) ** (deg - j) * (-1.0) ** j
            total += b * math.factorial(j) / rho ** (j + 1)
        return scale * total
    if x1 == math.inf:
        if not rho < 0:
            raise RuntimeError("divergent right-tail moment integral")
        scale = math.exp(rho * (x0 - xref))
        total = 0.0
        for j in range(deg + 1):
            a = k * math.comb(deg, j) * (x0 - center) ** (deg - j)
            total += a * math.factorial(j) / (-rho) ** (j + 1)
        return scale * total
    scale = math.exp(rho * (x0 - xref))
    moments = _exp_moments(x1 - x0, rho, deg)
    total = 0.0
    for j in range(deg + 1):
        a = k * math.comb(deg, j) * (x0 - center) ** (deg - j)
        total += a * moments[j]
    return scale * total


def _moment_one_piece(piece, k, center, indicator):
    """``int phi'(x) (indicator - G(x)) dx`` over one curve piece."""
    x0, x1, c0, c1, rho, xref = piece
    total = 0.0
    a0 = indicator - c0
    if a0 != 0.0:
        if math.isinf(x0) or math.isinf(x1):
            raise RuntimeError("constant term on an unbounded moment piece")
        total += a0 * ((x1 - center) ** k - (x0 - center) ** k)
    if c1 != 0.0:
        total -= c1 * _poly_exp_integral(x0, x1, rho, xref, k, center)
    return total


def moment_bounds(band: LogLinearBand, k: int, center: float = 0.0) -> BoundsInterval:
    """Enclosure of ``int (x - center)^k dG`` over CDFs G in the band.

    Evaluates ``phi(0) + int phi'(x)(1_{x>=0} - G(x)) dx`` with G replaced
    piecewise by whichever completed boundary extremizes the integrand: where
    ``phi' >= 0`` the upper boundary minimizes and the lower maximizes, and
    vice versa on ``phi' < 0``.  When ``phi'`` changes sign (even k with
    center inside the support) the pointwise selector ignores monotonicity
    of G, so the interval is conservative: it contains, and may strictly
    exceed, the attainable range.
    """
    if k < 1 or int(k) != k:
        raise ValueError("k must be an integer >= 1")
    k = int(k)
    cuts = (0.0, float(center))
    up = _split_pieces(_upper_curve(band), cuts)
    low = _split_pieces(_lower_curve(band), cuts)
    phi0 = (0.0 - center) ** k
    lo = hi = phi0
    for piece_up, piece_low in zip(up, low):
        x0, x1 = piece_up[0], piece_up[1]
        indicator = 1.0 if x0 >= 0.0 else 0.0
        mid = x1 if x0 == -math.inf else (x0 if x1 == math.inf else 0.5 * (x0 + x1))
        positive = k % 2 == 1 or mid >= center
        if positive:
            lo += _moment_one_piece(piece_up, k, center, indicator)
            hi += _moment_one_piece(piece_low, k, center, indicator)
        else:
            lo += _moment_one_piece(piece_low, k, center, indicator)
            hi += _moment_one_piece(piece_up, k, center, indicator)
    return BoundsInterval(lo, hi)


def _log_boundaries(band: BandFn):
    with np.errstate(divide="ignore"):
        logL = np.log(band.lower)
        logU = np.log(band.upper)
        log1mL = np.log1p(-band.lower)
        log1mU = np.log1p(-band.upper)
    return logL, logU, log1mL, log1mU


def _secant_extreme(num_hi, num_lo, pts, mask, minimize):
    """min/max of (num_hi[s] - num_lo[r]) / (pts[s] - pts[r]) over index
    pairs allowed by ``mask`` (r = rows, s = columns)."""
    dx = pts[None, :] - pts[:, None]
    with np.errstate(invalid="ignore", divide="ignore"):
        cand = (num_hi[None, :] - num_lo[:, None]) / dx
    ok = mask & np.isfinite(cand)
    if not ok.any():
        return None
    vals = cand[ok]
    return float(vals.min() if minimize else vals.max())


def hazard_envelope(band: BandFn, x: float, kind: str) -> BoundsInterval:
    """Pointwise bounds on the hazard or reverse hazard of every
    bi-log-concave CDF inside the band.

    A bi-log-concave G has non-increasing ``(log G)'`` and non-decreasing
    ``-(log(1-G))'``, so secants of the log boundaries over grid pairs on one
    side of x bracket the derivative at x.  A side with no informative pair
    (wide band: a log boundary is -inf there) yields an unbounded endpoint
    (0 below, +inf above); x without any structural pair on either side is
    an error.
    """
    pts = band.grid.points
    if not pts[0] < x < pts[-1]:
        raise ValueError("x must lie strictly between the grid endpoints")
    if kind not in ("hazard", "reverse_hazard"):
        raise ValueError("kind must be 'hazard' or 'reverse_hazard'")
    logL, logU, log1mL, log1mU = _log_boundaries(band)
    r_lt_s = pts[:, None] < pts[None, :]
    s_le_x = (pts <= x)[None, :]
    r_ge_x = (pts >= x)[:, None]
    left_pairs = r_lt_s & s_le_x
    right_pairs = r_lt_s & r_ge_x
    if not left_pairs.any() or not right_pairs.any():
        raise ValueError("x is too close to a grid edge: no secant pair on one side")

    if kind == "reverse_hazard":
        hi = _secant_extreme(logU, logL, pts, left_pairs, minimize=True)
        lo = _secant_extreme(logL, logU, pts, right_pairs, minimize=False)
    else:
        # slopes of log(1-G): negating them gives hazards, so min/max swap
        hi = _secant_extreme(log1mU, log1mL, pts, right_pairs, minimize=False)
        lo = _secant_extreme(log1mL, log1mU, pts, left_pairs, minimize=True)
        hi = None if hi is None else -hi
        lo = None if lo is None else -lo

    hi = math.inf if hi is None else hi
    lo = 0.0 if lo is None else max(lo, 0.0)
    if lo > hi:
        raise ValueError("band admits no bi-log-concave CDF at x (crossed envelope)")
    return BoundsInterval(lo, hi)


def t1_t2(dist: AnalyticDist, grid):
    """Suprema of reverse hazard (T1) and hazard (T2) over the grid.

    ``grid`` is a Grid or a plain array of evaluation points.  A side on
    which the support of the distribution is bounded reports infinity (the
    corresponding supremum over all of J(F) diverges there).
    """
    x = np.asarray(getattr(grid, "points", grid), dtype=np.float64)
    F = np.asarray(dist.cdf(x), dtype=np.float64)
    S = np.asarray(dist.sf(x), dtype=np.float64)
    if np.any(F <= 0.0) or np.any(F >= 1.0) or np.any(S <= 0.0):
        raise ValueError("grid must lie strictly inside {0 < F < 1}")
    f = np.asarray(dist.pdf(x), dtype=np.float64)
    t1 = math.inf if math.isfinite(dist.support[0]) else float(np.max(f / F))
    t2 = math.inf if math.isfinite(dist.support[1]) else float(np.max(f / S))
    return t1, t2
