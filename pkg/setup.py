"""Build script: compiles the optional Cython kernel extension.

The extension is best-effort -- if Cython or a C compiler is unavailable the
package installs anyway and falls back to the pure-numpy kernels in
``blcbands._kernels_py`` (selected at import time by ``blcbands._backend``).
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize
    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "blcbands._kernels",
                ["src/blcbands/_kernels.pyx"],
                include_dirs=[numpy.get_include()],
                extra_compile_args=["-O3"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        language_level=3,
    )
except Exception as exc:  # pragma: no cover - depends on build environment
    import sys

    print(f"blcbands: skipping compiled kernels ({exc}); "
          "pure-Python fallback will be used", file=sys.stderr)

setup(ext_modules=ext_modules)
