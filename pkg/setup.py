"""Builds the optional compiled simplex kernel; the package works without it."""

import os

from setuptools import setup

ext_modules = []
if os.environ.get("OTSCONN_NO_EXT", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
        from setuptools import Extension

        ext_modules = cythonize(
            [
                Extension(
                    "otsconn.solver._kernel_ext",
                    ["src/otsconn/solver/_kernel_ext.pyx"],
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
