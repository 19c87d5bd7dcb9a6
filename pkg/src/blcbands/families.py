"""Analytic distribution families: CDF/density/derivative triples.

Each constructor returns an :class:`AnalyticDist` bundling vectorized
``cdf``, ``pdf``, ``pdf_deriv`` and a numerically stable survival function
``sf`` (1 - cdf computed without cancellation, which matters when hazard
ratios are formed deep in the upper tail).  ``support`` is the interval on
which 0 < F < 1; samplers are provided where a simple exact scheme exists.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special

__all__ = [
    "AnalyticDist",
    "normal",
    "logistic",
    "exponential",
    "mixture_normal",
    "sine_density",
    "dist_quantile",
]

_SQRT2 = math.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class AnalyticDist:
    """A distribution given by closed-form functions.

    ``pdf`` must be the derivative of ``cdf`` and ``pdf_deriv`` the
    derivative of ``pdf`` on the interior ``support`` (spot-checked in tests
    by finite differences).  ``sampler(rng, size)``, when present, draws
    i.i.d. observations with NumPy ``Generator`` randomness.
    """

    name: str
    cdf: Callable
    sf: Callable
    pdf: Callable
    pdf_deriv: Callable
    support: tuple
    sampler: Callable | None = None


def _phi(x):
    return _INV_SQRT_2PI * np.exp(-0.5 * np.square(x))


def _Phi(x):
    # complementary error function keeps relative accuracy in both tails
    return 0.5 * special.erfc(-np.asarray(x, dtype=np.float64) / _SQRT2)


def _Phi_bar(x):
    return 0.5 * special.erfc(np.asarray(x, dtype=np.float64) / _SQRT2)


def normal() -> AnalyticDist:
    """Standard normal distribution."""
    return AnalyticDist(
        name="normal",
        cdf=_Phi,
        sf=_Phi_bar,
        pdf=_phi,
        pdf_deriv=lambda x: -np.asarray(x, dtype=np.float64) * _phi(x),
        support=(-math.inf, math.inf),
        sampler=lambda rng, size: rng.standard_normal(size),
    )


def logistic() -> AnalyticDist:
    """Standard logistic distribution, F(x) = 1/(1 + exp(-x))."""
    cdf = special.expit

    def pdf(x):
        return special.expit(x) * special.expit(-np.asarray(x, dtype=np.float64))

    def pdf_deriv(x):
        x = np.asarray(x, dtype=np.float64)
        return pdf(x) * (1.0 - 2.0 * special.expit(x))

    return AnalyticDist(
        name="logistic",
        cdf=cdf,
        sf=lambda x: special.expit(-np.asarray(x, dtype=np.float64)),
        pdf=pdf,
        pdf_deriv=pdf_deriv,
        support=(-math.inf, math.inf),
        sampler=lambda rng, size: rng.logistic(size=size),
    )


def exponential() -> AnalyticDist:
    """Standard exponential distribution on (0, inf)."""

    def cdf(x):
        x = np.asarray(x, dtype=np.float64)
        return np.where(x > 0.0, -np.expm1(-np.maximum(x, 0.0)), 0.0)

    def sf(x):
        x = np.asarray(x, dtype=np.float64)
        return np.where(x > 0.0, np.exp(-np.maximum(x, 0.0)), 1.0)

    def pdf(x):
        x = np.asarray(x, dtype=np.float64)
        return np.where(x > 0.0, np.exp(-np.maximum(x, 0.0)), 0.0)

    def pdf_deriv(x):
        x = np.asarray(x, dtype=np.float64)
        return np.where(x > 0.0, -np.exp(-np.maximum(x, 0.0)), 0.0)

    return AnalyticDist(
        name="exponential",
        cdf=cdf,
        sf=sf,
        pdf=pdf,
        pdf_deriv=pdf_deriv,
        support=(0.0, math.inf),
        sampler=lambda rng, size: rng.standard_exponential(size),
    )


def mixture_normal(delta: float) -> AnalyticDist:
    """Equal-weight mixture of N(-delta, 1) and N(delta, 1).

    ``delta = 0`` reduces to the standard normal.  The mixture is the
    canonical family whose shape degrades smoothly from unimodal to bimodal
    as ``delta`` grows.
    """
    if delta < 0:
        raise ValueError("delta must be >= 0")
    d = float(delta)

    def cdf(x):
        x = np.asarray(x, dtype=np.float64)
        return 0.5 * (_Phi(x - d) + _Phi(x + d))

    def sf(x):
        x = np.asarray(x, dtype=np.float64)
        return 0.5 * (_Phi_bar(x - d) + _Phi_bar(x + d))

    def pdf(x):
        x = np.asarray(x, dtype=np.float64)
        return 0.5 * (_phi(x - d) + _phi(x + d))

    def pdf_deriv(x):
        x = np.asarray(x, dtype=np.float64)
        return 0.5 * (-(x - d) * _phi(x - d) - (x + d) * _phi(x + d))

    def sampler(rng, size):
        signs = 2.0 * rng.integers(0, 2, size=size) - 1.0
        return rng.standard_normal(size) + signs * d

    return AnalyticDist(
        name=f"mixture_normal(delta={d:g})",
        cdf=cdf,
        sf=sf,
        pdf=pdf,
        pdf_deriv=pdf_deriv,
        support=(-math.inf, math.inf),
        sampler=sampler,
    )


def sine_density(k: int, a: float) -> AnalyticDist:
    """Density ``1 + a*sin(2*pi*k*x)`` on (0, 1).

    The CDF is ``x + a*(1 - cos(2*pi*k*x))/(2*pi*k)``; it equals 1 at x = 1
    for every k because the sine perturbation integrates to zero over each
    period.  ``pdf_deriv = 2*pi*k*a*cos(2*pi*k*x)``.
    """
    if k < 1 or int(k) != k:
        raise ValueError("k must be an integer >= 1")
    if not 0.0 < a < 1.0:
        raise ValueError("a must lie in (0, 1)")
    k = int(k)
    w = 2.0 * math.pi * k

    def cdf(x):
        x = np.asarray(x, dtype=np.float64)
        xc = np.clip(x, 0.0, 1.0)
        # 1 - cos(w x) = 2 sin^2(w x / 2): no cancellation near x = 0
        inner = xc + a * np.square(np.sin(0.5 * w * xc)) / (0.5 * w)
        return np.where(x <= 0.0, 0.0, np.where(x >= 1.0, 1.0, inner))

    def sf(x):
        x = np.asarray(x, dtype=np.float64)
        eps = np.clip(1.0 - x, 0.0, 1.0)
        # sin^2 is symmetric about the period ends, so the tail mass is the
        # same expression in eps = 1 - x: stays accurate as x -> 1
        inner = eps - a * np.square(np.sin(0.5 * w * eps)) / (0.5 * w)
        return np.where(x <= 0.0, 1.0, np.where(x >= 1.0, 0.0, inner))

    def pdf(x):
        x = np.asarray(x, dtype=np.float64)
        return np.where((x > 0.0) & (x < 1.0), 1.0 + a * np.sin(w * x), 0.0)

    def pdf_deriv(x):
        x = np.asarray(x, dtype=np.float64)
        return np.where((x > 0.0) & (x < 1.0), w * a * np.cos(w * x), 0.0)

    return AnalyticDist(
        name=f"sine_density(k={k}, a={a:g})",
        cdf=cdf,
        sf=sf,
        pdf=pdf,
        pdf_deriv=pdf_deriv,
        support=(0.0, 1.0),
    )


def dist_quantile(dist: AnalyticDist, q: float) -> float:
    """Quantile by bisection on the (continuous, increasing) CDF."""
    if not 0.0 < q < 1.0:
        raise ValueError("q must lie in (0, 1)")
    lo, hi = dist.support
    if not math.isfinite(lo):
        lo = -1.0
        while float(dist.cdf(lo)) > q:
            lo *= 2.0
            if lo < -1e12:
                raise RuntimeError("quantile bracket search failed (left)")
    if not math.isfinite(hi):
        hi = 1.0
        while float(dist.cdf(hi)) < q:
            hi *= 2.0
            if hi > 1e12:
                raise RuntimeError("quantile bracket search failed (right)")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if float(dist.cdf(mid)) < q:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-13 * max(1.0, abs(lo), abs(hi)):
            break
    return 0.5 * (lo + hi)
