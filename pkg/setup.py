"""Build script: compiles the optional Monte Carlo kernel.

The package works without the extension (a numpy fallback is selected at
import time), so any failure here is non-fatal by design: build with
HOMLINK_SKIP_EXT=1 to skip the extension entirely.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("HOMLINK_SKIP_EXT"):
    import numpy as np
    from Cython.Build import cythonize

    from setuptools import Extension

    ext_modules = cythonize(
        [
            Extension(
                "homlink.csintegral._gauss_cy",
                ["src/homlink/csintegral/_gauss_cy.pyx"],
                include_dirs=[np.get_include()],
                # -ffp-contract=off: the numpy fallback must produce
                # bit-identical values, so no fused multiply-adds.
                extra_compile_args=["-O3", "-ffp-contract=off"],
                define_macros=[("NPY_NO_DEPRECATED_API", "NPY_1_7_API_VERSION")],
            )
        ],
        compiler_directives={"language_level": "3"},
    )

setup(ext_modules=ext_modules)
