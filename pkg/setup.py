"""Builds the optional compiled scan kernels.

The package is fully functional without the extension (a pure-Python
fallback is selected at import time); building it just makes the
correlated loss/delay scans much faster.  Build in place with:

    python setup.py build_ext --inplace
"""

from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "railsim._kernels",
                ["src/railsim/_kernels.pyx"],
                # -ffp-contract=off keeps the float results bit-identical to
                # the pure-Python fallback (no FMA contraction).
                extra_compile_args=["-O3", "-ffp-contract=off"],
            )
        ],
        language_level=3,
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
