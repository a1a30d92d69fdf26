"""Builds the optional compiled LPA kernels; the package falls back to numpy without them."""

from setuptools import setup

ext_modules = []
try:
    import numpy  # noqa: F401
    from Cython.Build import cythonize
except ImportError:
    pass
else:
    ext_modules = cythonize(["src/rgflow/lpa/_kernels.pyx"], language_level=3, quiet=True)

setup(ext_modules=ext_modules)
