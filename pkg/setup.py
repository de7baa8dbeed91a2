"""Build the optional compiled orbit kernels; the package works without them."""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("IETLAB_NO_EXTENSION", "") in ("", "0"):
    try:
        from Cython.Build import cythonize
    except ImportError:
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [
                Extension(
                    "ietlab._core",
                    ["src/ietlab/_core.pyx"],
                    extra_compile_args=["-O3", "-ffp-contract=off"],
                )
            ],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
