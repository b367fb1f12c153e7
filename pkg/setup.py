"""Build script: compiles the optional speed-up extension.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compile only costs performance.
"""

import sys

from setuptools import Extension, setup

ext_modules = []
try:
    from Cython.Build import cythonize

    ext_modules = cythonize(
        [
            Extension(
                "refcast._kernels._speedups",
                ["src/refcast/_kernels/_speedups.pyx"],
                extra_compile_args=["-O3"],
            )
        ],
        language_level=3,
    )
except ImportError:
    print("warning: Cython not available, installing without compiled kernels",
          file=sys.stderr)

setup(ext_modules=ext_modules)
