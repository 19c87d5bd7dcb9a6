"""Concave interior of a pair of boundary functions on a grid.

Given values ``ell <= u`` on a grid (``-inf`` allowed), this computes the
tightest pair of functions enclosing every concave g with
``ell <= g <= u`` on the grid:

* ``ell_o`` -- the least concave majorant of ``ell`` (equals the pointwise
  infimum of the feasible g when any exists);
* ``u_o``  -- the pointwise supremum of the feasible g, obtained as the
  minimum over chords anchored at a majorant knot on one side and a ceiling
  value on the other (evaluable anywhere, not just on the grid).

Feasibility holds iff ``ell_o <= u`` at every grid point.  Grid points where
``u = -inf`` pin any feasible g to ``-inf`` on the corresponding side; they
are feasible only outside the majorant's knot span.
"""

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._backend import concave_majorant_knots, interior_upper_eval
from .core import ConcaveEnvelope

__all__ = [
    "BoundaryPair",
    "ConcIntResult",
    "least_concave_majorant",
    "conc_int",
    "eval_u_o",
]

# relative feasibility slack: absorbs round-off on pinched pairs, where the
# log of a stored probability carries noise well above machine epsilon
_FEAS_RTOL = 1e-10


@dataclass
class BoundaryPair:
    """Lower/upper boundary values on a grid; ``ell`` may contain -inf.

    ``ell <= u`` pointwise (equality allowed, so pinched pairs are valid) and
    ``ell`` must be finite at two or more points for the majorant to exist.
    ``u`` may be ``-inf`` only where ``ell`` is.
    """

    grid: np.ndarray
    ell: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=np.float64)
        self.ell = np.asarray(self.ell, dtype=np.float64)
        self.u = np.asarray(self.u, dtype=np.float64)
        if self.grid.ndim != 1 or self.grid.size < 2:
            raise ValueError("grid must be 1-d with at least two points")
        if not np.all(np.diff(self.grid) > 0):
            raise ValueError("grid must be strictly increasing")
        if self.ell.shape != self.grid.shape or self.u.shape != self.grid.shape:
            raise ValueError("boundary arrays must match the grid length")
        if np.any(np.isnan(self.ell)) or np.any(np.isnan(self.u)):
            raise ValueError("boundary values must not be NaN")
        if np.any(self.ell == np.inf) or np.any(self.u == np.inf):
            raise ValueError("boundary values must be < +inf")
        if np.any(self.ell > self.u):
            raise ValueError("need ell <= u pointwise")
        if np.sum(np.isfinite(self.ell)) < 2:
            raise ValueError("ell must be finite at two or more grid points")


def least_concave_majorant(grid, ell) -> ConcaveEnvelope:
    """Least concave majorant of ``ell`` on ``grid`` (-inf entries ignored).

    The result is -inf outside the span of the finite points and linear
    between knots; knots are minimal (collinear runs collapse to their
    outermost points, which makes the operation exactly idempotent).
    """
    grid = np.asarray(grid, dtype=np.float64)
    ell = np.asarray(ell, dtype=np.float64)
    finite = np.isfinite(ell)
    if finite.sum() < 2:
        raise ValueError("ell must be finite at two or more grid points")
    fx = grid[finite]
    fy = ell[finite]
    knots = concave_majorant_knots(fx, fy)
    return ConcaveEnvelope(fx[knots], fy[knots])


@dataclass
class ConcIntResult:
    """Outcome of :func:`conc_int`.

    ``ell_o`` is always the least concave majorant of the input ``ell``;
    ``feasible`` records whether it stays below the ceiling, and ``u_o``
    (method) evaluates the interior upper envelope when it does.
    """

    pair: BoundaryPair
    ell_o: ConcaveEnvelope
    feasible: bool

    @cached_property
    def _finite_u(self) -> np.ndarray:
        return np.isfinite(self.pair.u)

    @cached_property
    def _pinned(self) -> tuple[float, float]:
        # Ceiling -inf at a grid point pins feasible g to -inf on the far
        # side of the knot span: left of the largest such point below the
        # span, right of the smallest such point above it.
        g = self.pair.grid
        neg = ~self._finite_u
        lo, hi = -np.inf, np.inf
        if neg.any():
            left = neg & (g < self.ell_o.knots_x[0])
            right = neg & (g > self.ell_o.knots_x[-1])
            if left.any():
                lo = g[left].max()
            if right.any():
                hi = g[right].min()
        return lo, hi

    def u_o(self, x):
        """Interior upper envelope at arbitrary points (feasible pairs only)."""
        if not self.feasible:
            raise ValueError("u_o is undefined for an infeasible pair")
        x = np.asarray(x, dtype=np.float64)
        flat = np.atleast_1d(x)
        g = self.pair.grid[self._finite_u]
        u = self.pair.u[self._finite_u]
        out = interior_upper_eval(g, u, self.ell_o.knots_x, self.ell_o.knots_y, flat)
        pin_lo, pin_hi = self._pinned
        out = np.where((flat <= pin_lo) | (flat >= pin_hi), -np.inf, out)
        return float(out[0]) if x.ndim == 0 else out


def conc_int(pair: BoundaryPair) -> ConcIntResult:
    """Compute the concave interior of a boundary pair.

    Returns the majorant together with a feasibility verdict; see the module
    docstring.  ``u_o`` evaluation on an infeasible result raises.
    """
    env = least_concave_majorant(pair.grid, pair.ell)
    ell_o_grid = env(pair.grid)
    slack = _FEAS_RTOL * np.maximum(1.0, np.abs(pair.u))
    with np.errstate(invalid="ignore"):
        ok = ell_o_grid <= pair.u + np.where(np.isfinite(pair.u), slack, 0.0)
    # -inf <= -inf comparisons come out True; only finite ell_o over a -inf
    # ceiling (or over a lower finite ceiling) breaks feasibility
    feasible = bool(np.all(ok))
    return ConcIntResult(pair=pair, ell_o=env, feasible=feasible)


def eval_u_o(result: ConcIntResult, x):
    """Functional form of :meth:`ConcIntResult.u_o`."""
    return result.u_o(x)
