"""Refine a confidence band to the bi-log-concave distribution functions.

Given a band (L, U) on a grid, the refined band is the pointwise infimum and
supremum of all bi-log-concave CDFs G with ``L <= G <= U`` on the grid.  It
is computed by alternating concave-interior steps in the two log scales
until a fixpoint:

    (l, u) <- conc_int(log L, log U);         (L, U) <- (exp l, exp u)
    (l, u) <- conc_int(log(1-U), log(1-L));   (L, U) <- (1 - exp u, 1 - exp l)

Each half-step only moves boundaries inward, so the iteration converges
monotonically; an infeasible concave-interior step proves that no
bi-log-concave CDF fits inside the band, which is reported as a result (with
confidence 1-alpha: F is not bi-log-concave), not an error.

The refined boundaries inherit two structural properties used downstream
(:func:`lipschitz_bound`, :func:`tail_bound_check`): a global Lipschitz
constant and exponentially decaying tails, both read off band values at two
anchor points.
"""

import math
from dataclasses import dataclass

import numpy as np

from .concint import BoundaryPair, conc_int
from .core import BandFn, Verdict, eval_band

__all__ = [
    "RefineResult",
    "refine_blc",
    "lipschitz_bound",
    "tail_bound_check",
]

# monotonicity/ordering wobble beyond this is a logic error, not rounding
_GUARD = 1e-8


@dataclass
class RefineResult:
    """Outcome of :func:`refine_blc`.

    ``feasible=False`` means some concave-interior step failed: no
    bi-log-concave CDF fits the input band, and ``band`` is None.
    ``converged`` records whether the sup-norm change fell below tol within
    ``max_iter`` iterations (``iterations`` = full loop passes run).
    """

    feasible: bool
    band: BandFn | None
    iterations: int
    converged: bool


def _log(values):
    with np.errstate(divide="ignore"):
        return np.log(values)


def _monotonize(L, U, what: str):
    """Clip to [0,1], restore non-decreasingness inward, keep L <= U.

    Exact arithmetic preserves all three properties through every half-step;
    anything beyond rounding wobble (> _GUARD) indicates a broken transform
    and raises.
    """
    L = np.clip(L, 0.0, 1.0)
    U = np.clip(U, 0.0, 1.0)
    Lm = np.maximum.accumulate(L)
    Um = np.minimum.accumulate(U[::-1])[::-1]
    if np.max(Lm - L) > _GUARD or np.max(U - Um) > _GUARD:
        raise RuntimeError(f"{what}: monotonicity wobble exceeds guard")
    if np.max(Lm - Um) > _GUARD:
        raise RuntimeError(f"{what}: boundaries crossed beyond rounding")
    # + 0.0 canonicalizes the -0.0 produced by -expm1(0.0)
    return Lm + 0.0, np.maximum(Um, Lm) + 0.0


def _half_step(pts, ell, u):
    """One concave-interior pass in a log scale.

    Returns refined (ell, u) values on the grid, or None when infeasible.
    With fewer than two finite floor entries the concave constraint is
    vacuous and the step is the identity.
    """
    if np.count_nonzero(np.isfinite(ell)) < 2:
        return ell, u
    res = conc_int(BoundaryPair(pts, ell, u))
    if not res.feasible:
        return None
    return res.ell_o(pts), res.u_o(pts)


def refine_blc(band: BandFn, max_iter: int = 200, tol: float = 1e-9) -> RefineResult:
    """Intersect a band with the bi-log-concave shape constraint.

    Alternates concave-interior steps on log F and log(1-F) until the
    sup-norm change over one full iteration is <= tol or max_iter is
    reached.  A feasible result's band is nested inside the input band and
    is (numerically) a fixpoint: re-refining converges in one iteration.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if tol <= 0:
        raise ValueError("tol must be > 0")
    pts = band.grid.points
    L = band.lower.copy()
    U = band.upper.copy()
    iterations = 0
    converged = False
    for iterations in range(1, max_iter + 1):
        L_prev, U_prev = L, U

        step = _half_step(pts, _log(L), _log(U))
        if step is None:
            return RefineResult(False, None, iterations, False)
        ell_o, u_o = step
        L, U = _monotonize(np.exp(ell_o), np.exp(u_o), "log-F step")

        step = _half_step(pts, _log(1.0 - U), _log(1.0 - L))
        if step is None:
            return RefineResult(False, None, iterations, False)
        ell_o, u_o = step
        L, U = _monotonize(-np.expm1(u_o), -np.expm1(ell_o), "log-(1-F) step")

        delta = max(np.max(np.abs(L - L_prev)), np.max(np.abs(U - U_prev)))
        if delta <= tol:
            converged = True
            break
    return RefineResult(True, BandFn(band.grid, L, U), iterations, converged)


def _check_anchor_args(a, b, r, s):
    if not a < b:
        raise ValueError("need a < b")
    if not 0.0 < r < s < 1.0:
        raise ValueError("need 0 < r < s < 1")


def lipschitz_bound(band: BandFn, a: float, b: float, r: float, s: float) -> float:
    """Global Lipschitz constant for every bi-log-concave CDF in the band.

    Requires anchors with ``lower(a) >= r`` and ``upper(b) <= s``; the
    constant is ``max(log(s/r), log((1-r)/(1-s))) / (b - a)`` and also bounds
    the grid slopes of the refined boundaries themselves.
    """
    _check_anchor_args(a, b, r, s)
    lo_a, _ = eval_band(band, a)
    _, hi_b = eval_band(band, b)
    if lo_a < r:
        raise ValueError(f"anchor requires lower({a}) >= r, got {lo_a}")
    if hi_b > s:
        raise ValueError(f"anchor requires upper({b}) <= s, got {hi_b}")
    return max(math.log(s / r), math.log((1.0 - r) / (1.0 - s))) / (b - a)


def tail_bound_check(band: BandFn, a: float, b: float, r: float, s: float) -> Verdict:
    """Scan the exponential tail bounds of a refined band.

    With anchors ``upper(a) <= r`` and ``lower(b) >= s`` the refined upper
    boundary satisfies ``U(x) <= r*exp(gamma1*(x-a))`` for grid x <= a and
    the lower one ``1-L(x) <= (1-s)*exp(-gamma2*(x-b))`` for grid x >= b,
    with ``gamma1 = log(s/r)/(b-a)`` and ``gamma2 = log((1-r)/(1-s))/(b-a)``.
    Returns the first violating grid point on failure.
    """
    _check_anchor_args(a, b, r, s)
    _, hi_a = eval_band(band, a)
    lo_b, _ = eval_band(band, b)
    if hi_a > r:
        raise ValueError(f"anchor requires upper({a}) <= r, got {hi_a}")
    if lo_b < s:
        raise ValueError(f"anchor requires lower({b}) >= s, got {lo_b}")
    gamma1 = math.log(s / r) / (b - a)
    gamma2 = math.log((1.0 - r) / (1.0 - s)) / (b - a)
    pts = band.grid.points

    left = pts <= a
    bound = r * np.exp(gamma1 * (pts[left] - a))
    margin = bound * (1.0 + 1e-9) + 1e-12 - band.upper[left]
    bad = np.flatnonzero(margin < 0.0)
    if bad.size:
        i = int(bad[0])
        return Verdict(False, where=float(pts[left][i]), margin=float(margin[i]),
                       detail="upper tail")

    right = pts >= b
    bound = (1.0 - s) * np.exp(-gamma2 * (pts[right] - b))
    margin = bound * (1.0 + 1e-9) + 1e-12 - (1.0 - band.lower[right])
    bad = np.flatnonzero(margin < 0.0)
    if bad.size:
        i = int(bad[0])
        return Verdict(False, where=float(pts[right][i]), margin=float(margin[i]),
                       detail="lower tail")
    return Verdict(True)
