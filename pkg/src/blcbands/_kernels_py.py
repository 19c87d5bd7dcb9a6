"""Pure-numpy kernels: least-concave-majorant knots and interior upper envelope.

These are the hot inner loops of the band refinement iteration.  A compiled
Cython twin (``blcbands._kernels``) implements the same two functions with
identical signatures and semantics; ``blcbands._backend`` picks whichever is
available at import time.  Keep the two implementations in sync.
"""

import numpy as np

_CHUNK = 512  # probe block size; caps the (p, m) scratch matrices


def concave_majorant_knots(x, y):
    """Knot indices of the least concave majorant of the points (x[i], y[i]).

    ``x`` must be strictly increasing and ``y`` finite.  Returns the indices
    of the upper-hull vertices in increasing order; the first and last point
    are always knots.  Collinear interior points are dropped, so the knot set
    is minimal (slopes strictly decrease between consecutive knots).
    """
    x = np.ascontiguousarray(x, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    n = x.size
    stack = [0]
    for k in range(1, n):
        while len(stack) >= 2:
            i, j = stack[-2], stack[-1]
            # pop j when slope(i->j) <= slope(j->k); equality drops collinear
            if (y[j] - y[i]) * (x[k] - x[j]) <= (y[k] - y[j]) * (x[j] - x[i]):
                stack.pop()
            else:
                break
        stack.append(k)
    return np.asarray(stack, dtype=np.int64)


def interior_upper_eval(grid, u, kx, ky, probes):
    """Tightest concave upper envelope between a majorant and a ceiling.

    Evaluates, at each probe point ``z``, the minimum over chord extensions

        u[s] + (u[s] - ky[r]) / (grid[s] - kx[r]) * (z - grid[s])

    over pairs with ``kx[r] < grid[s] <= z`` or ``z <= grid[s] < kx[r]``.
    (kx, ky) are the majorant knots, ``u`` the ceiling values on ``grid``.
    Entries with no admissible pair evaluate to +inf.
    """
    grid = np.ascontiguousarray(grid, dtype=np.float64)
    u = np.ascontiguousarray(u, dtype=np.float64)
    kx = np.ascontiguousarray(kx, dtype=np.float64)
    ky = np.ascontiguousarray(ky, dtype=np.float64)
    probes = np.ascontiguousarray(probes, dtype=np.float64)

    # For fixed s the minimum over left knots r is attained by the smallest
    # chord slope (extension goes right), and over right knots by the largest
    # (extension goes left); reduce the pair family to one line per s.
    dx = grid[None, :] - kx[:, None]  # (b, m)
    with np.errstate(divide="ignore", invalid="ignore"):
        sl = (u[None, :] - ky[:, None]) / dx
    left = dx > 0
    right = dx < 0
    beta_lo = np.where(left, sl, np.inf).min(axis=0)
    beta_hi = np.where(right, sl, -np.inf).max(axis=0)
    has_lo = left.any(axis=0)
    has_hi = right.any(axis=0)

    out = np.empty(probes.size, dtype=np.float64)
    for start in range(0, probes.size, _CHUNK):
        z = probes[start:start + _CHUNK, None] - grid[None, :]  # (p, m)
        # inf * 0 inside the masked-out entries is discarded by the where
        with np.errstate(invalid="ignore"):
            a = np.where((z >= 0) & has_lo, u + beta_lo * z, np.inf)
            b = np.where((z <= 0) & has_hi, u + beta_hi * z, np.inf)
        out[start:start + _CHUNK] = np.minimum(a.min(axis=1), b.min(axis=1))
    return out
