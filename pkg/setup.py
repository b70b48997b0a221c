"""Build script for the optional compiled kernel.

The package is fully functional without the extension; if Cython or a C
compiler is unavailable the build falls back to the pure-numpy kernels
selected at import time by masertur.kernels.
"""

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    extensions = [
        Extension(
            "masertur._kernels_cy",
            ["src/masertur/_kernels_cy.pyx"],
            # -ffp-contract=off keeps the scalar loop bit-compatible with
            # the vectorized numpy fallback (no FMA contraction).
            extra_compile_args=["-O3", "-ffp-contract=off"],
        )
    ]
    ext_modules = cythonize(extensions, compiler_directives={"language_level": "3"})
except ImportError:
    pass

setup(ext_modules=ext_modules)
