"""Kernel backend selection: compiled Cython if available, numpy otherwise.

Set ``BLCBANDS_PURE_PYTHON=1`` in the environment to force the numpy
fallback (used by the benchmark and by tests that compare the two).
"""

import os

if os.environ.get("BLCBANDS_PURE_PYTHON"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

USING_COMPILED_KERNELS = _impl.__name__.endswith("._kernels")

concave_majorant_knots = _impl.concave_majorant_knots
interior_upper_eval = _impl.interior_upper_eval
