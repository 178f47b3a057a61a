"""Build hook for the compiled assignment kernel.

The package works without the extension (a pure-Python kernel is selected
at import time); set W2ASSIM_PURE_PYTHON=1 to skip compiling it.
"""

import os

from setuptools import Extension, setup

ext_modules = []
if os.environ.get("W2ASSIM_PURE_PYTHON") != "1":
    try:
        from Cython.Build import cythonize

        ext_modules = cythonize(
            [Extension("w2assim.lap._dense", ["src/w2assim/lap/_dense.pyx"])],
            language_level=3,
        )
    except ImportError:
        ext_modules = []

setup(ext_modules=ext_modules)
