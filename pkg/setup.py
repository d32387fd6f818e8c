"""Builds the optional compiled ANN kernel.

Set AGROADVISOR_PURE=1 to skip the extension; the package then runs on the
pure-Python graph backend.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("AGROADVISOR_PURE") != "1":
    try:
        import numpy
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [
                Extension(
                    "agroadvisor.index._hnsw_cy",
                    ["src/agroadvisor/index/_hnsw_cy.pyx"],
                    include_dirs=[numpy.get_include()],
                    # fast-math lets the distance reductions vectorize;
                    # inputs are validated finite before they reach the kernel
                    extra_compile_args=["-O3", "-ffast-math"],
                    define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
                )
            ],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
