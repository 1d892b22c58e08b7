"""Build the optional compiled simulation kernel.

The package works without it: ``ctgranger.sim`` falls back to a pure
Python/NumPy recursion when the extension is missing.
"""
import os

import numpy as np
from setuptools import setup
from setuptools.extension import Extension

ext_modules = []
if os.environ.get("CTGRANGER_NO_EXT") != "1":
    try:
        from Cython.Build import cythonize
    except ImportError:  # pragma: no cover - build without Cython
        cythonize = None
    if cythonize is not None:
        ext_modules = cythonize(
            [Extension("ctgranger._simkernel", ["src/ctgranger/_simkernel.pyx"],
                       include_dirs=[np.get_include()])],
            compiler_directives={"language_level": "3"},
        )

setup(ext_modules=ext_modules)
