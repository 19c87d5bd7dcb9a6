"""Bi-log-concavity checks for analytic distributions.

A CDF F is bi-log-concave when log F and log(1-F) are both concave on
J(F) = {0 < F < 1}.  For differentiable families this is equivalent to
either of two pointwise conditions, checked here on a grid:

* derivative sandwich: ``-f(x)^2/(1-F(x)) <= f'(x) <= f(x)^2/F(x)``;
* monotone ratios: hazard ``f/(1-F)`` non-decreasing and reverse hazard
  ``f/F`` non-increasing.

Both checks return a :class:`~blcbands.core.Verdict` carrying the first
violating grid point, and must agree on any family (they are two readings of
the same property); the numeric slacks exist only to keep boundary cases
from flickering on floating-point noise.
"""

import numpy as np

from .core import Grid, Verdict
from .families import AnalyticDist, dist_quantile

__all__ = [
    "check_blc_iv",
    "check_blc_iii",
    "blc_bounds_ii",
    "check_grid",
]


def _interior_values(dist: AnalyticDist, grid: Grid):
    x = grid.points
    F = np.asarray(dist.cdf(x), dtype=np.float64)
    S = np.asarray(dist.sf(x), dtype=np.float64)
    if np.any(F <= 0.0) or np.any(F >= 1.0) or np.any(S <= 0.0):
        raise ValueError("grid must lie strictly inside {0 < F < 1}")
    f = np.asarray(dist.pdf(x), dtype=np.float64)
    return x, F, S, f


def check_blc_iv(dist: AnalyticDist, grid: Grid, slack: float = 1e-8) -> Verdict:
    """Derivative-sandwich check: ``-f^2/(1-F) - s <= f' <= f^2/F + s``.

    The effective slack at x is ``slack * (1 + |f'(x)|)`` (relative in the
    derivative scale), so verdicts at near-equality parameter values are
    stable against rounding while genuine violations still fire.
    """
    if slack < 0:
        raise ValueError("slack must be >= 0")
    x, F, S, f = _interior_values(dist, grid)
    fp = np.asarray(dist.pdf_deriv(x), dtype=np.float64)
    tol = slack * (1.0 + np.abs(fp))
    f2 = np.square(f)
    margin_hi = f2 / F + tol - fp
    margin_lo = fp + f2 / S + tol
    margins = np.minimum(margin_hi, margin_lo)
    bad = np.flatnonzero(margins < 0.0)
    if bad.size == 0:
        return Verdict(True)
    i = int(bad[0])
    side = "upper" if margin_hi[i] < margin_lo[i] else "lower"
    return Verdict(False, where=float(x[i]), margin=float(margins[i]), detail=side)


def check_blc_iii(dist: AnalyticDist, grid: Grid, slack: float = 1e-8) -> Verdict:
    """Monotone-ratio check: hazard non-decreasing, reverse hazard
    non-increasing along the grid.

    A step from x_i to x_{i+1} counts as a violation when the ratio moves the
    wrong way by more than ``slack * step * (1 + |ratio|)`` (slack per unit
    step, relative in the ratio scale).
    """
    if slack < 0:
        raise ValueError("slack must be >= 0")
    x, F, S, f = _interior_values(dist, grid)
    hazard = f / S
    reverse = f / F
    dx = np.diff(x)
    tol_h = slack * dx * (1.0 + np.maximum(np.abs(hazard[:-1]), np.abs(hazard[1:])))
    tol_r = slack * dx * (1.0 + np.maximum(np.abs(reverse[:-1]), np.abs(reverse[1:])))
    margin_h = np.diff(hazard) + tol_h
    margin_r = tol_r - np.diff(reverse)
    margins = np.minimum(margin_h, margin_r)
    bad = np.flatnonzero(margins < 0.0)
    if bad.size == 0:
        return Verdict(True)
    i = int(bad[0])
    side = "hazard" if margin_h[i] < margin_r[i] else "reverse_hazard"
    return Verdict(False, where=float(x[i + 1]), margin=float(margins[i]), detail=side)


def blc_bounds_ii(dist: AnalyticDist, x: float, t):
    """Exponential sandwich around F(x + t) anchored at x.

    Returns ``(upper, lower)`` with ``upper = F(x) exp((f/F)(x) t)`` and
    ``lower = 1 - (1-F(x)) exp(-(f/(1-F))(x) t)``; for a bi-log-concave F
    these enclose F(x + t) for every t.  ``t`` may be an array.
    """
    F = float(dist.cdf(x))
    S = float(dist.sf(x))
    if not (0.0 < F < 1.0):
        raise ValueError("x must lie inside {0 < F < 1}")
    f = float(dist.pdf(x))
    t = np.asarray(t, dtype=np.float64)
    upper = F * np.exp(f / F * t)
    lower = 1.0 - S * np.exp(-f / S * t)
    if t.ndim == 0:
        return float(upper), float(lower)
    return upper, lower


def check_grid(dist: AnalyticDist, num: int = 2001, eps: float = 1e-12) -> Grid:
    """Equispaced verdict grid over the part of J(F) with eps < F < 1 - eps.

    The truncation keeps hazard ratios finite at the grid ends; 2001 points
    resolve the known near-boundary cases without noticeable cost.
    """
    if num < 2:
        raise ValueError("num must be >= 2")
    x_lo = dist_quantile(dist, 2.0 * eps)
    x_hi = dist_quantile(dist, 1.0 - 2.0 * eps)
    return Grid(np.linspace(x_lo, x_hi, num))
