"""Empirical CDF and the three unconstrained confidence-band constructions.

Three band families around the empirical CDF, each calibrated through the
distribution-free statistic of the probability-transformed order statistics:

* ``KS``  -- plain Kolmogorov-Smirnov band ``ecdf +/- kappa/sqrt(n)``;
* ``WKS`` -- weighted KS band with weight ``(t(1-t))**gamma``, tighter in the
  tails for ``gamma > 0``;
* ``ODW`` -- order-statistic band from inverting the Bernoulli
  Kullback-Leibler divergence with additive weight terms.

Critical values come from :func:`mc_quantile` (Monte Carlo over uniform order
statistics); :func:`massart_kappa` gives the closed-form upper bound for KS.

For interval-censored samples the lower boundary is computed from the upper
interval endpoints and the upper boundary from the lower endpoints, so the
band still covers the CDF of the latent exact observations.
"""

import math
from dataclasses import dataclass

import numpy as np

from .core import BandFn, Grid, Sample, build_grid

__all__ = [
    "BandSpec",
    "ecdf",
    "massart_kappa",
    "ks_band",
    "wks_band",
    "odw_band",
    "ks_statistic",
    "wks_statistic",
    "odw_statistic",
    "kl_bernoulli",
    "kl_invert",
    "odw_weights",
    "mc_quantile",
]

# smallest probability reachable by the KL bisection bracket; exp(-690) is
# just inside the double range, so "level -> infinity" limits stay finite
_P_FLOOR_LOG = -690.0


@dataclass(frozen=True)
class BandSpec:
    """Band kind plus its calibration parameters.

    ``gamma`` is only meaningful for WKS (weight exponent in [0, 0.5)) and
    ``nu`` only for ODW (> 2); ``kappa`` is the critical value, usually a
    :func:`mc_quantile` output or :func:`massart_kappa` for KS.
    """

    kind: str
    alpha: float
    kappa: float
    gamma: float = 0.4
    nu: float = 3.0

    def __post_init__(self):
        if self.kind not in ("KS", "WKS", "ODW"):
            raise ValueError(f"unknown band kind {self.kind!r}")
        if not 0.0 < self.alpha <= 0.5:
            raise ValueError("alpha must lie in (0, 0.5]")
        if not self.kappa > 0:
            raise ValueError("kappa must be > 0")
        if self.kind == "WKS" and not 0.0 <= self.gamma < 0.5:
            raise ValueError("gamma must lie in [0, 0.5) for WKS")
        if self.kind == "ODW" and not self.nu > 2:
            raise ValueError("nu must be > 2 for ODW")


class Ecdf:
    """Right-continuous empirical CDF, evaluable at scalars or arrays."""

    def __init__(self, values):
        values = np.asarray(values, dtype=np.float64)
        if values.size == 0:
            raise ValueError("empty sample")
        self.sorted_values = np.sort(values)
        self.n = values.size

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        out = np.searchsorted(self.sorted_values, x, side="right") / self.n
        return float(out) if x.ndim == 0 else out


def ecdf(sample: Sample) -> Ecdf:
    """Empirical CDF of the sample values (jump 1/n at each order statistic)."""
    return Ecdf(sample.values)


def massart_kappa(alpha: float) -> float:
    """Upper bound sqrt(log(2/alpha)/2) for the exact KS critical value."""
    if not 0.0 < alpha <= 0.5:
        raise ValueError("alpha must lie in (0, 0.5]")
    return math.sqrt(math.log(2.0 / alpha) / 2.0)


def _band_endpoints(sample: Sample):
    """Sorted per-boundary data: lower boundary from the upper interval
    endpoints, upper boundary from the lower endpoints (identical for exact
    samples)."""
    if sample.is_censored:
        return np.sort(sample.censor_hi), np.sort(sample.censor_lo)
    xs = np.sort(sample.values)
    return xs, xs


def _step_band(grid: Grid, lo_points, lo_levels, up_points, up_levels) -> BandFn:
    """Assemble a BandFn from per-interval levels keyed by order-statistic
    counts: at x the lower level has index #{lower-data <= x}, likewise for
    the upper."""
    idx_lo = np.searchsorted(lo_points, grid.points, side="right")
    idx_up = np.searchsorted(up_points, grid.points, side="right")
    return BandFn(grid, lo_levels[idx_lo], up_levels[idx_up])


def ks_band(sample: Sample, spec: BandSpec, grid: Grid | None = None) -> BandFn:
    """KS band: ``max(ecdf - kappa/sqrt(n), 0)`` to ``min(ecdf + kappa/sqrt(n), 1)``."""
    if spec.kind != "KS":
        raise ValueError("spec.kind must be KS")
    if grid is None:
        grid = build_grid(sample)
    lo_pts, up_pts = _band_endpoints(sample)
    n = sample.n
    half = spec.kappa / math.sqrt(n)
    i = np.arange(n + 1) / n
    lo_levels = np.maximum(i - half, 0.0)
    up_levels = np.minimum(i + half, 1.0)
    return _step_band(grid, lo_pts, lo_levels, up_pts, up_levels)


def _wks_interval_levels(n: int, kappa: float, gamma: float):
    """Per-interval band levels for the weighted KS construction.

    The constraint at the i-th order statistic is
    ``|F(X_(i)) - t_i| <= kappa/sqrt(n) * (t_i(1-t_i))**gamma`` with
    ``t_i = i/(n+1)``; pushing each constraint onto the adjacent
    order-statistic intervals gives a lower level per interval
    ``[X_(i), X_(i+1))`` (0 for i=0) and an upper level (1 for i=n).
    The levels are monotonized by cumulative max/min, which leaves the
    confidence set unchanged (any non-decreasing F inside the raw levels is
    inside the monotone ones and vice versa).
    """
    t = np.arange(1, n + 1) / (n + 1)
    half = kappa / math.sqrt(n) * (t * (1.0 - t)) ** gamma
    lo = np.clip(t - half, 0.0, 1.0)
    hi = np.clip(t + half, 0.0, 1.0)
    lo = np.maximum.accumulate(lo)
    hi = np.minimum.accumulate(hi[::-1])[::-1]
    lo_levels = np.concatenate([[0.0], lo])
    up_levels = np.concatenate([hi, [1.0]])
    return lo_levels, up_levels


def wks_band(sample: Sample, spec: BandSpec, grid: Grid | None = None) -> BandFn:
    """Weighted KS band on order-statistic intervals (see module docstring)."""
    if spec.kind != "WKS":
        raise ValueError("spec.kind must be WKS")
    if grid is None:
        grid = build_grid(sample)
    lo_pts, up_pts = _band_endpoints(sample)
    lo_levels, up_levels = _wks_interval_levels(sample.n, spec.kappa, spec.gamma)
    return _step_band(grid, lo_pts, lo_levels, up_pts, up_levels)


def kl_bernoulli(p_hat: float, p: float) -> float:
    """Bernoulli Kullback-Leibler divergence K(p_hat, p).

    Conventions: ``0*log(.) = 0`` and ``a*log(a/0) = inf`` for ``a > 0``;
    the value is 0 iff ``p_hat = p`` (for interior p) and may be ``inf``.
    """
    if not (0.0 <= p_hat <= 1.0 and 0.0 <= p <= 1.0):
        raise ValueError("arguments must lie in [0, 1]")
    total = 0.0
    if p_hat > 0.0:
        if p == 0.0:
            return math.inf
        total += p_hat * math.log(p_hat / p)
    if p_hat < 1.0:
        if p == 1.0:
            return math.inf
        total += (1.0 - p_hat) * math.log((1.0 - p_hat) / (1.0 - p))
    return total


def odw_weights(t: float):
    """Additive weight terms ``C(t) = log(1 + logit(t)^2/2)/2`` and
    ``D(t) = log(1 + C(t)^2/2)/2``."""
    if not 0.0 < t < 1.0:
        raise ValueError("t must lie in (0, 1)")
    logit = math.log(t / (1.0 - t))
    c = 0.5 * math.log1p(0.5 * logit * logit)
    d = 0.5 * math.log1p(0.5 * c * c)
    return c, d


def kl_invert(t: float, gamma_level: float, side: str) -> float:
    """Solve ``K(t, p) = gamma_level`` for p on one side of t by bisection.

    ``side="lower"`` returns the smallest ``p <= t`` with
    ``K(t, p) <= gamma_level``, ``side="upper"`` the largest ``p >= t``;
    K(t, .) is strictly monotone on each side, so bisection applies.  The
    search runs in log(p) (resp. log(1-p)) so that levels approaching the
    divergence of K near 0/1 resolve accurately; the bracket is floored at
    ``exp(-690)``, which caps the "level -> infinity" limits.
    """
    if not 0.0 < t < 1.0:
        raise ValueError("t must lie in (0, 1)")
    if gamma_level < 0.0:
        raise ValueError("gamma_level must be >= 0")
    if gamma_level == 0.0:
        return t

    if side == "lower":
        # p = exp(y), y in [floor, log t]; K decreasing in y
        def excess(y):
            return kl_bernoulli(t, math.exp(y)) - gamma_level

        hi_y = math.log(t)
        if excess(_P_FLOOR_LOG) <= 0.0:
            return math.exp(_P_FLOOR_LOG)
        lo_y, hi = _P_FLOOR_LOG, hi_y
        for _ in range(200):
            mid = 0.5 * (lo_y + hi)
            if excess(mid) > 0.0:
                lo_y = mid
            else:
                hi = mid
            if hi - lo_y <= 1e-14:
                break
        return math.exp(hi)
    if side == "upper":
        # p = 1 - exp(y); K increasing in p, decreasing in y
        def excess(y):
            return kl_bernoulli(t, 1.0 - math.exp(y)) - gamma_level

        hi_y = math.log(1.0 - t)
        if excess(_P_FLOOR_LOG) <= 0.0:
            return 1.0 - math.exp(_P_FLOOR_LOG)
        lo_y, hi = _P_FLOOR_LOG, hi_y
        for _ in range(200):
            mid = 0.5 * (lo_y + hi)
            if excess(mid) > 0.0:
                lo_y = mid
            else:
                hi = mid
            if hi - lo_y <= 1e-14:
                break
        return 1.0 - math.exp(hi)
    raise ValueError("side must be 'lower' or 'upper'")


def _odw_interval_levels(n: int, kappa: float, nu: float):
    """Per-interval levels from inverting the KL constraint
    ``(n+1) K(t_j, F(X_(j))) <= C_j + nu*D_j + kappa`` at each order
    statistic, monotonized as in the weighted KS case."""
    t = np.arange(1, n + 1) / (n + 1)
    lo = np.empty(n)
    hi = np.empty(n)
    for j in range(n):
        c, d = odw_weights(t[j])
        level = (c + nu * d + kappa) / (n + 1)
        if level < 0.0:
            level = 0.0
        lo[j] = kl_invert(t[j], level, "lower")
        hi[j] = kl_invert(t[j], level, "upper")
    lo = np.maximum.accumulate(lo)
    hi = np.minimum.accumulate(hi[::-1])[::-1]
    lo_levels = np.concatenate([[0.0], lo])
    up_levels = np.concatenate([hi, [1.0]])
    return lo_levels, up_levels


def odw_band(sample: Sample, spec: BandSpec, grid: Grid | None = None) -> BandFn:
    """Order-statistic band from the KL-divergence constraints (see module
    docstring); ``L = 0`` left of the first order statistic and ``U = 1``
    right of the last."""
    if spec.kind != "ODW":
        raise ValueError("spec.kind must be ODW")
    if grid is None:
        grid = build_grid(sample)
    lo_pts, up_pts = _band_endpoints(sample)
    lo_levels, up_levels = _odw_interval_levels(sample.n, spec.kappa, spec.nu)
    return _step_band(grid, lo_pts, lo_levels, up_pts, up_levels)


def _check_uniform_order_stats(u):
    u = np.asarray(u, dtype=np.float64)
    if u.ndim != 1 or u.size == 0:
        raise ValueError("need a non-empty 1-d array of order statistics")
    if np.any(u <= 0.0) or np.any(u >= 1.0):
        raise ValueError("order statistics must lie strictly in (0, 1)")
    if np.any(np.diff(u) < 0):
        raise ValueError("order statistics must be sorted")
    return u


def ks_statistic(uniform_order_stats) -> float:
    """``sqrt(n) * sup_x |ecdf(x) - x|`` for sorted uniforms."""
    u = _check_uniform_order_stats(uniform_order_stats)
    n = u.size
    i = np.arange(1, n + 1)
    d = np.maximum(i / n - u, u - (i - 1) / n)
    return math.sqrt(n) * float(d.max())


def wks_statistic(uniform_order_stats, gamma: float) -> float:
    """``sqrt(n) * max_i |U_(i) - t_i| / (t_i(1-t_i))**gamma`` with
    ``t_i = i/(n+1)``."""
    if not 0.0 <= gamma < 0.5:
        raise ValueError("gamma must lie in [0, 0.5)")
    u = _check_uniform_order_stats(uniform_order_stats)
    n = u.size
    t = np.arange(1, n + 1) / (n + 1)
    return math.sqrt(n) * float((np.abs(u - t) / (t * (1.0 - t)) ** gamma).max())


def odw_statistic(uniform_order_stats, nu: float) -> float:
    """``max_j ((n+1) K(t_j, U_(j)) - C(t_j) - nu*D(t_j))``; may be negative."""
    if not nu > 2:
        raise ValueError("nu must be > 2")
    u = _check_uniform_order_stats(uniform_order_stats)
    n = u.size
    t = np.arange(1, n + 1) / (n + 1)
    c, d = _odw_weights_vec(t)
    return float(((n + 1) * _kl_vec(t, u) - c - nu * d).max())


def _kl_vec(t, u):
    """kl_bernoulli for matching arrays with all entries strictly inside (0,1)."""
    return t * np.log(t / u) + (1.0 - t) * np.log((1.0 - t) / (1.0 - u))


def _odw_weights_vec(t):
    logit = np.log(t / (1.0 - t))
    c = 0.5 * np.log1p(0.5 * logit * logit)
    d = 0.5 * np.log1p(0.5 * c * c)
    return c, d


# cap on floats drawn per Monte Carlo chunk (~80 MB)
_MC_CHUNK_FLOATS = 10_000_000


def mc_quantile(
    kind: str,
    n: int,
    alpha: float,
    reps: int = 100_000,
    seed=None,
    gamma: float = 0.4,
    nu: float = 3.0,
) -> float:
    """Monte Carlo critical value: conservative empirical (1-alpha)-quantile
    of the chosen statistic over ``reps`` simulations of n uniform order
    statistics.

    The returned value is the ``ceil((1-alpha)(reps+1))``-th order statistic
    of the simulated values -- the standard conservative choice, biased
    slightly upward against the exact quantile.  Deterministic given ``seed``.
    """
    if kind not in ("KS", "WKS", "ODW"):
        raise ValueError(f"unknown band kind {kind!r}")
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0.0 < alpha <= 0.5:
        raise ValueError("alpha must lie in (0, 0.5]")
    if reps < 1000:
        raise ValueError("reps must be >= 1000")

    i = np.arange(1, n + 1)
    t = i / (n + 1)
    if kind == "KS":
        lo_ref, hi_ref = (i - 1) / n, i / n
    elif kind == "WKS":
        if not 0.0 <= gamma < 0.5:
            raise ValueError("gamma must lie in [0, 0.5)")
        w = (t * (1.0 - t)) ** gamma
    else:
        if not nu > 2:
            raise ValueError("nu must be > 2")
        c, d = _odw_weights_vec(t)
        shift = c + nu * d

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    stats = np.empty(reps)
    done = 0
    chunk = max(1, _MC_CHUNK_FLOATS // n)
    root_n = math.sqrt(n)
    while done < reps:
        m = min(chunk, reps - done)
        u = np.sort(rng.random((m, n)), axis=1)
        if kind == "ODW":
            # random() can return exactly 0.0; keep the KL term finite
            np.clip(u, 1e-300, None, out=u)
        if kind == "KS":
            s = root_n * np.maximum(hi_ref - u, u - lo_ref).max(axis=1)
        elif kind == "WKS":
            s = root_n * (np.abs(u - t) / w).max(axis=1)
        else:
            s = ((n + 1) * _kl_vec(t, u) - shift).max(axis=1)
        stats[done : done + m] = s
        done += m
    stats.sort()
    k = min(reps, math.ceil((1.0 - alpha) * (reps + 1)))
    return float(stats[k - 1])
