"""Build script: compiles the optional Cython cocycle kernel.

The package works without the extension (a numpy fallback is selected at
import time), so a failed compile only costs performance.
"""

from setuptools import setup

ext_modules = []
try:
    import numpy
    from Cython.Build import cythonize

    ext_modules = cythonize(
        ["src/subspec/_kernels/_cocycle_cy.pyx"],
        language_level=3,
    )
    include_dirs = [numpy.get_include()]
except ImportError:
    include_dirs = []

for ext in ext_modules:
    ext.include_dirs.extend(include_dirs)

setup(ext_modules=ext_modules)
