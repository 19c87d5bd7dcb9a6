"""Shape-constrained confidence bands for distribution functions.

Builds simultaneous confidence bands for a CDF from an i.i.d. (possibly
interval-censored) sample, then sharpens them under the assumption that the
truth has log-concave ``F`` and ``1 - F`` ("bi-log-concave").  The refined
bands come with certified consequences: Lipschitz bounds on the CDF,
exponential tail envelopes, hazard-rate envelopes, and two-sided bounds on
moments and moment generating functions.

The hot geometric kernels have a compiled backend with a pure-Python
fallback; see ``blcbands._backend``.
"""

__version__ = "0.1.0"

from ._backend import USING_COMPILED_KERNELS
from .bands import (
    BandSpec,
    Ecdf,
    ecdf,
    kl_bernoulli,
    kl_invert,
    ks_band,
    ks_statistic,
    massart_kappa,
    mc_quantile,
    odw_band,
    odw_statistic,
    odw_weights,
    wks_band,
    wks_statistic,
)
from .checks import blc_bounds_ii, check_blc_iii, check_blc_iv, check_grid
from .concint import BoundaryPair, ConcIntResult, conc_int, eval_u_o, least_concave_majorant
from .core import (
    BandFn,
    BoundsInterval,
    ConcaveEnvelope,
    Grid,
    Sample,
    Verdict,
    build_grid,
    eval_band,
)
from .families import (
    AnalyticDist,
    dist_quantile,
    exponential,
    logistic,
    mixture_normal,
    normal,
    sine_density,
)
from .functionals import (
    LogLinearBand,
    band_to_loglinear,
    hazard_envelope,
    loglinear_from_band,
    mgf_bounds,
    moment_bounds,
    t1_t2,
)
from .refine import RefineResult, lipschitz_bound, refine_blc, tail_bound_check
from .sim import ConsistencyRow, SimReport, calibrated_kappa, run_consistency, run_coverage

__all__ = [
    "__version__",
    "USING_COMPILED_KERNELS",
    # core
    "Sample",
    "Grid",
    "BandFn",
    "ConcaveEnvelope",
    "BoundsInterval",
    "Verdict",
    "build_grid",
    "eval_band",
    # bands
    "BandSpec",
    "Ecdf",
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
    # concint
    "BoundaryPair",
    "ConcIntResult",
    "conc_int",
    "eval_u_o",
    "least_concave_majorant",
    # refine
    "RefineResult",
    "refine_blc",
    "lipschitz_bound",
    "tail_bound_check",
    # families / checks
    "AnalyticDist",
    "normal",
    "logistic",
    "exponential",
    "mixture_normal",
    "sine_density",
    "dist_quantile",
    "check_blc_iii",
    "check_blc_iv",
    "check_grid",
    "blc_bounds_ii",
    # functionals
    "LogLinearBand",
    "band_to_loglinear",
    "loglinear_from_band",
    "mgf_bounds",
    "moment_bounds",
    "hazard_envelope",
    "t1_t2",
    # sim
    "SimReport",
    "ConsistencyRow",
    "calibrated_kappa",
    "run_coverage",
    "run_consistency",
]
