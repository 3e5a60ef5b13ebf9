"""Build script: compiles the optional _speedups extension.

Set TREEMI_NO_EXT=1 to skip the compiled kernels entirely; the package
falls back to the pure-Python implementation at import time.
"""

import os

from setuptools import setup

ext_modules = []
if not os.environ.get("TREEMI_NO_EXT"):
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            ["src/treemi/_speedups.pyx"],
            language_level=3,
        )
    except ImportError:
        pass

setup(ext_modules=ext_modules)
