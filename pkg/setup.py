"""Build script for the optional compiled simulation core.

The package works without the extension (a pure-Python fallback is selected
at import time), so any failure to build it is non-fatal.
"""

from setuptools import setup

ext_modules = []
try:
    from Cython.Build import cythonize
    import numpy

    ext_modules = cythonize(
        ["src/softarith/_simcore.pyx"],
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )
    include_dirs = [numpy.get_include()]
except Exception:
    include_dirs = []

setup(ext_modules=ext_modules, include_dirs=include_dirs)
