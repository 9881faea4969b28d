"""Build script: compiles the optional Cython allocation kernel.

The package is fully functional without the extension (a pure-Python
kernel is selected at import time); set ESQOE_PURE_PYTHON=1 to skip
compilation explicitly.
"""

import os

from setuptools import Extension, setup


def extensions():
    if os.environ.get("ESQOE_PURE_PYTHON") == "1":
        return []
    try:
        from Cython.Build import cythonize
    except ImportError:
        return []
    ext = Extension("esqoe._ckernel", ["src/esqoe/_ckernel.pyx"])
    return cythonize([ext], language_level="3")


setup(ext_modules=extensions())
